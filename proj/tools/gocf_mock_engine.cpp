// Line-protocol front end for the deterministic mock engine: one JSON
// request per input line, one JSON response per output line.

#include <iostream>
#include <string>

#include "gocf/engine/mock_engine.hpp"

int main() {
  std::ios::sync_with_stdio(false);
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    std::cout << gocf::MockEngine::handle_line(line) << '\n' << std::flush;
  }
  return 0;
}
