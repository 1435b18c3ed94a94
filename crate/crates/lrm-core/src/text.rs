//! Token normalization shared by the lexical modules.

/// Case-folds and strips leading/trailing punctuation, keeping internal
/// apostrophes and hyphens. Linguistic matching is case-insensitive
/// everywhere; LRM files keep their original casing.
pub fn normalize_token(token: &str) -> String {
    token
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase()
}
