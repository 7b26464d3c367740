//! The twelve CREMA-D sentences and a universal-POS annotation for each word.

pub const SENTENCES: [&str; 12] = [
    "I would like a new alarm clock",
    "I think I have a doctor's appointment",
    "Don't forget a jacket",
    "I think I've seen this before",
    "The surface is slick",
    "We'll stop in a couple of minutes",
    "It's eleven o'clock",
    "That is exactly what happened",
    "I'm on my way to the meeting",
    "I wonder what this is about",
    "The airplane is almost full",
    "Maybe tomorrow it will be cold",
];

/// CREMA-D three-letter sentence codes, in the same order as [`SENTENCES`].
pub const SENTENCE_CODES: [&str; 12] = ["IWL", "ITH", "DFA", "ITS", "TSI", "WSI", "IEO", "TIE", "IOM", "IWW", "TAI", "MTI"];

/// The 17-tag universal part-of-speech set.
pub const UPOS_TAGS: [&str; 17] = [
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM", "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM",
    "VERB", "X",
];

/// One UPOS tag per word of each sentence in [`SENTENCES`].
pub const POS_TAGS: [&[&str]; 12] = [
    &["PRON", "AUX", "VERB", "DET", "ADJ", "NOUN", "NOUN"],
    &["PRON", "VERB", "PRON", "VERB", "DET", "NOUN", "NOUN"],
    &["AUX", "VERB", "DET", "NOUN"],
    &["PRON", "VERB", "PRON", "VERB", "PRON", "ADV"],
    &["DET", "NOUN", "AUX", "ADJ"],
    &["PRON", "VERB", "ADP", "DET", "NOUN", "ADP", "NOUN"],
    &["PRON", "NUM", "ADV"],
    &["PRON", "AUX", "ADV", "PRON", "VERB"],
    &["PRON", "ADP", "PRON", "NOUN", "ADP", "DET", "NOUN"],
    &["PRON", "VERB", "PRON", "PRON", "AUX", "ADP"],
    &["DET", "NOUN", "AUX", "ADV", "ADJ"],
    &["ADV", "NOUN", "PRON", "AUX", "AUX", "ADJ"],
];

pub const NUM_SPEAKERS: usize = 91;
