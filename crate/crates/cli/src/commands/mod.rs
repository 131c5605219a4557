pub mod bench;
pub mod hier;
pub mod sample;
pub mod verify;

/// Prints one JSON object per line on standard output.
pub(crate) fn emit(value: &serde_json::Value) {
    println!("{value}");
}
