fn main() {
    // Subcommands are added as the library modules land.
}
