// CLI entry point; subcommands are filled in as the library lands.
#include <cstdio>

int main() {
  std::puts("obkm: subcommands not wired yet");
  return 1;
}
