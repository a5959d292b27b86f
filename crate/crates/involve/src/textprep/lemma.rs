//! Dictionary-backed suffix lemmatizer for English.
//!
//! An exception table handles irregular forms and words the suffix rules
//! would mangle; the rules cover regular plural `-s`, `-ing`, and `-ed`
//! inflection. Token labeling only requires that a word map to the same
//! lemma wherever it occurs, which the frozen table plus deterministic
//! rules guarantee. Identified by [`LEMMATIZER_ID`] in dataset metadata.

/// Identifier recorded in dataset metadata.
pub const LEMMATIZER_ID: &str = "dict-en-v1";

/// Irregular forms and rule overrides, sorted by surface form.
static EXCEPTIONS: &[(&str, &str)] = &[
    ("acquired", "acquire"),
    ("acquiring", "acquire"),
    ("adhered", "adhere"),
    ("agreed", "agree"),
    ("aliases", "alias"),
    ("am", "be"),
    ("analyses", "analysis"),
    ("anything", "anything"),
    ("are", "be"),
    ("arisen", "arise"),
    ("arose", "arise"),
    ("atlases", "atlas"),
    ("axes", "axis"),
    ("became", "become"),
    ("been", "be"),
    ("began", "begin"),
    ("begun", "begin"),
    ("being", "be"),
    ("belonged", "belong"),
    ("biases", "bias"),
    ("brought", "bring"),
    ("built", "build"),
    ("buses", "bus"),
    ("came", "come"),
    ("caused", "cause"),
    ("causing", "cause"),
    ("children", "child"),
    ("chose", "choose"),
    ("chosen", "choose"),
    ("cited", "cite"),
    ("citing", "cite"),
    ("competed", "compete"),
    ("competing", "compete"),
    ("completed", "complete"),
    ("completing", "complete"),
    ("controlled", "control"),
    ("controlling", "control"),
    ("coped", "cope"),
    ("corpora", "corpus"),
    ("criteria", "criterion"),
    ("dealt", "deal"),
    ("deleted", "delete"),
    ("deleting", "delete"),
    ("depleted", "deplete"),
    ("developed", "develop"),
    ("developing", "develop"),
    ("did", "do"),
    ("does", "do"),
    ("doing", "do"),
    ("done", "do"),
    ("drawn", "draw"),
    ("drew", "draw"),
    ("during", "during"),
    ("dying", "die"),
    ("evening", "evening"),
    ("everything", "everything"),
    ("excited", "excite"),
    ("exciting", "excite"),
    ("fallen", "fall"),
    ("feet", "foot"),
    ("fell", "fall"),
    ("felt", "feel"),
    ("focused", "focus"),
    ("focusing", "focus"),
    ("found", "find"),
    ("freed", "free"),
    ("gases", "gas"),
    ("gave", "give"),
    ("given", "give"),
    ("goes", "go"),
    ("going", "go"),
    ("gone", "go"),
    ("got", "get"),
    ("gotten", "get"),
    ("grew", "grow"),
    ("grown", "grow"),
    ("guaranteed", "guarantee"),
    ("guided", "guide"),
    ("guiding", "guide"),
    ("had", "have"),
    ("has", "have"),
    ("held", "hold"),
    ("hoped", "hope"),
    ("hoping", "hope"),
    ("hypotheses", "hypothesis"),
    ("ignited", "ignite"),
    ("indices", "index"),
    ("interfered", "interfere"),
    ("interfering", "interfere"),
    ("invited", "invite"),
    ("inviting", "invite"),
    ("is", "be"),
    ("kept", "keep"),
    ("knew", "know"),
    ("known", "know"),
    ("labelled", "label"),
    ("labelling", "label"),
    ("led", "lead"),
    ("left", "leave"),
    ("lenses", "lens"),
    ("longed", "long"),
    ("lost", "lose"),
    ("lying", "lie"),
    ("made", "make"),
    ("matrices", "matrix"),
    ("meant", "mean"),
    ("men", "man"),
    ("met", "meet"),
    ("mice", "mouse"),
    ("modelled", "model"),
    ("modelling", "model"),
    ("monitored", "monitor"),
    ("monitoring", "monitor"),
    ("morning", "morning"),
    ("nothing", "nothing"),
    ("ongoing", "ongoing"),
    ("paid", "pay"),
    ("parentheses", "parenthesis"),
    ("paused", "pause"),
    ("phenomena", "phenomenon"),
    ("proved", "prove"),
    ("proven", "prove"),
    ("proving", "prove"),
    ("ran", "run"),
    ("required", "require"),
    ("requiring", "require"),
    ("risen", "rise"),
    ("rose", "rise"),
    ("said", "say"),
    ("sang", "sing"),
    ("sat", "sit"),
    ("saw", "see"),
    ("scoped", "scope"),
    ("seen", "see"),
    ("sent", "send"),
    ("series", "series"),
    ("shoes", "shoe"),
    ("shown", "show"),
    ("sold", "sell"),
    ("something", "something"),
    ("sought", "seek"),
    ("species", "species"),
    ("spent", "spend"),
    ("statuses", "status"),
    ("stored", "store"),
    ("storing", "store"),
    ("tailored", "tailor"),
    ("tailoring", "tailor"),
    ("taken", "take"),
    ("taught", "teach"),
    ("teeth", "tooth"),
    ("theses", "thesis"),
    ("thought", "think"),
    ("ties", "tie"),
    ("told", "tell"),
    ("took", "take"),
    ("tying", "tie"),
    ("understood", "understand"),
    ("underwent", "undergo"),
    ("united", "unite"),
    ("uniting", "unite"),
    ("used", "use"),
    ("uses", "use"),
    ("using", "use"),
    ("viruses", "virus"),
    ("was", "be"),
    ("welcomed", "welcome"),
    ("went", "go"),
    ("were", "be"),
    ("women", "woman"),
    ("writing", "write"),
    ("written", "write"),
    ("wrote", "write"),
];

/// Consonants that undouble after `-ed`/`-ing` stripping (`stopped` -> `stop`).
/// `l`, `s`, `f`, `z` stay doubled (`falling` -> `fall`, `passing` -> `pass`).
const UNDOUBLE: &[char] = &['b', 'd', 'g', 'k', 'm', 'n', 'p', 'r', 't'];

/// Stem endings that keep a bare final consonant instead of restoring `e`
/// (`visit`, `target`, `model`, `develop`, `consider`, `happen`, ...).
const NO_E_RESTORE: &[&str] = &["el", "en", "er", "et", "it", "on", "op"];

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

fn is_mid_vowel(c: char) -> bool {
    is_vowel(c) || c == 'y'
}

fn is_consonant(c: char) -> bool {
    c.is_ascii_lowercase() && !is_vowel(c)
}

/// Decides whether a stripped `-ed`/`-ing` stem regularly ends in a dropped
/// `e`: `improv` -> `improve`, `chang` -> `change`, `enabl` -> `enable`,
/// `argu` -> `argue`.
fn restores_e(stem: &str) -> bool {
    let chars: Vec<char> = stem.chars().collect();
    let n = chars.len();
    if n < 3 {
        return false;
    }
    let (a, b, c) = (chars[n - 3], chars[n - 2], chars[n - 1]);
    // English words do not end in bare `u` or `v`: argu(e), achiev(e),
    // observ(e), solv(e).
    if c == 'u' || c == 'v' {
        return true;
    }
    // consonant-vowel-consonant, excluding endings that usually stay bare.
    // A `u` before `a`/`o` behaves like a consonant (evaluate, quote).
    let acts_as_onset = is_consonant(a) || a == 'u' && matches!(b, 'a' | 'o');
    if is_consonant(c)
        && !matches!(c, 'w' | 'x' | 'y')
        && is_mid_vowel(b)
        && acts_as_onset
        && !NO_E_RESTORE.iter().any(|suf| stem.ends_with(suf))
    {
        return true;
    }
    // consonant clusters whose final letter is never word-final in English
    // verbs: enhanc(e), chang(e), solv(e), organiz(e)
    if is_consonant(c) && is_consonant(b) && b != c && matches!(c, 'c' | 'g' | 'v' | 'z') {
        return true;
    }
    // stop + l clusters: enabl(e), sampl(e), cycl(e), settl(e)
    if c == 'l' && matches!(b, 'b' | 'c' | 'd' | 'f' | 'g' | 'k' | 'p' | 't' | 'z') {
        return true;
    }
    false
}

fn strip_participle(stem: &str) -> String {
    let chars: Vec<char> = stem.chars().collect();
    let n = chars.len();
    if n >= 4 && chars[n - 1] == chars[n - 2] && UNDOUBLE.contains(&chars[n - 1]) {
        return stem[..stem.len() - 1].to_string();
    }
    if restores_e(stem) {
        return format!("{stem}e");
    }
    stem.to_string()
}

/// Lemmatize a single lowercase word. Callers lowercase first; punctuation,
/// numerals, and contractions pass through unchanged.
pub fn lemmatize(word: &str) -> String {
    if let Ok(idx) = EXCEPTIONS.binary_search_by(|(k, _)| (*k).cmp(word)) {
        return EXCEPTIONS[idx].1.to_string();
    }
    if !word.chars().all(|c| c.is_ascii_lowercase()) {
        return word.to_string();
    }
    let n = word.len();

    // Plural -s family.
    if n >= 5 && word.ends_with("ies") {
        return format!("{}y", &word[..n - 3]);
    }
    if n >= 5
        && (word.ends_with("sses")
            || word.ends_with("xes")
            || word.ends_with("ches")
            || word.ends_with("shes")
            || word.ends_with("oes"))
    {
        return word[..n - 2].to_string();
    }
    if n >= 4
        && word.ends_with('s')
        && !word.ends_with("ss")
        && !word.ends_with("us")
        && !word.ends_with("is")
    {
        return word[..n - 1].to_string();
    }

    // Progressive -ing.
    if n >= 6 && word.ends_with("ing") {
        let stem = &word[..n - 3];
        if stem.chars().any(is_vowel) {
            return strip_participle(stem);
        }
    }

    // Past -ed. Words ending in -eed (speed, exceed) are not past forms;
    // the real ones (agreed, freed) live in the exception table.
    if n >= 5 && word.ends_with("ed") && !word.ends_with("eed") {
        let stem = &word[..n - 2];
        if stem.chars().any(is_vowel) {
            if let Some(prefix) = stem.strip_suffix('i') {
                return format!("{prefix}y");
            }
            return strip_participle(stem);
        }
    }

    word.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exception_table_is_sorted() {
        let mut sorted = EXCEPTIONS.to_vec();
        sorted.sort_unstable_by(|a, b| a.0.cmp(b.0));
        assert_eq!(sorted, EXCEPTIONS);
    }

    #[test]
    fn regular_plurals() {
        for (w, l) in [
            ("networks", "network"),
            ("results", "result"),
            ("studies", "study"),
            ("matches", "match"),
            ("boxes", "box"),
            ("classes", "class"),
            ("processes", "process"),
            ("houses", "house"),
            ("cases", "case"),
            ("abilities", "ability"),
            ("methods", "method"),
            ("approaches", "approach"),
            ("sizes", "size"),
            ("issues", "issue"),
        ] {
            assert_eq!(lemmatize(w), l, "lemma of {w}");
        }
    }

    #[test]
    fn short_and_protected_words_unchanged() {
        for w in ["gas", "basis", "class", "campus", "this", "as", "run", "speed", "string"] {
            assert_eq!(lemmatize(w), w);
        }
    }

    #[test]
    fn progressive_forms() {
        for (w, l) in [
            ("improving", "improve"),
            ("running", "run"),
            ("training", "train"),
            ("writing", "write"),
            ("making", "make"),
            ("falling", "fall"),
            ("passing", "pass"),
            ("generating", "generate"),
            ("modeling", "model"),
            ("showing", "show"),
            ("studying", "study"),
            ("learning", "learn"),
            ("processing", "process"),
            ("changing", "change"),
            ("sampling", "sample"),
            ("enabling", "enable"),
            ("seeing", "see"),
        ] {
            assert_eq!(lemmatize(w), l, "lemma of {w}");
        }
    }

    #[test]
    fn past_forms() {
        for (w, l) in [
            ("improved", "improve"),
            ("stopped", "stop"),
            ("studied", "study"),
            ("trained", "train"),
            ("based", "base"),
            ("proposed", "propose"),
            ("evaluated", "evaluate"),
            ("limited", "limit"),
            ("visited", "visit"),
            ("considered", "consider"),
            ("targeted", "target"),
            ("combined", "combine"),
            ("achieved", "achieve"),
            ("reduced", "reduce"),
            ("needed", "need"),
            ("looked", "look"),
            ("enhanced", "enhance"),
            ("solved", "solve"),
            ("observed", "observe"),
            ("involved", "involve"),
            ("enabled", "enable"),
            ("embedded", "embed"),
            ("argued", "argue"),
            ("provided", "provide"),
            ("examined", "examine"),
            ("measured", "measure"),
            ("compared", "compare"),
            ("explored", "explore"),
            ("confused", "confuse"),
            ("added", "add"),
        ] {
            assert_eq!(lemmatize(w), l, "lemma of {w}");
        }
    }

    #[test]
    fn irregular_forms() {
        for (w, l) in [
            ("are", "be"),
            ("was", "be"),
            ("been", "be"),
            ("shown", "show"),
            ("found", "find"),
            ("used", "use"),
            ("using", "use"),
            ("criteria", "criterion"),
            ("analyses", "analysis"),
            ("developed", "develop"),
            ("cited", "cite"),
            ("required", "require"),
            ("caused", "cause"),
            ("biases", "bias"),
        ] {
            assert_eq!(lemmatize(w), l, "lemma of {w}");
        }
    }

    #[test]
    fn numerals_and_contractions_pass_through() {
        assert_eq!(lemmatize("2024"), "2024");
        assert_eq!(lemmatize("3"), "3");
        assert_eq!(lemmatize("don't"), "don't");
    }
}
