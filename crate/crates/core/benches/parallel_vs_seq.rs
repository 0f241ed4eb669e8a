// Placeholder; filled in once the full API exists.
fn main() {}
