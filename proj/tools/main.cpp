#include <cstdio>

int main() {
  std::puts("deepstage: CLI wiring pending");
  return 0;
}
