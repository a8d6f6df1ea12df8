// Placeholder CLI; subcommands are wired up as modules land.
#include <cstdio>
int main() { std::puts("mmpgen"); return 0; }
