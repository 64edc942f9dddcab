// Reads SGF files named on the command line, orders them, and prints each
// game's first novel move.
#include <iostream>

#include "gocf/corpus/ingest.hpp"
#include "gocf/corpus/sgf.hpp"
#include "gocf/novelty/novelty.hpp"

int main(int argc, char** argv) {
  std::vector<gocf::GameRecord> games;
  for (int i = 1; i < argc; ++i)
    for (auto& g : gocf::parse_sgf(gocf::read_file(argv[i]))) {
      g.game_id = argv[i];
      games.push_back(std::move(g));
    }
  std::stable_sort(games.begin(), games.end(), gocf::corpus_less);
  for (const auto& r : gocf::build_prefix_index(games).records)
    std::cout << r.game_id << "  " << r.date.to_string() << "  "
              << (r.novel_move_number ? std::to_string(*r.novel_move_number) : "-") << "\n";
}
