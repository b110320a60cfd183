#include <cstdio>

int main() {
  std::puts("symadapt CLI placeholder");
  return 0;
}
