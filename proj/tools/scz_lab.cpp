#include <cstdio>

int main() {
  std::puts("scz-lab: scenario runner not wired up yet");
  return 1;
}
