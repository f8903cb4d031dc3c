#pragma once

#include <string>
#include <vector>

namespace tsvolterra::selftest {

// One verification item. `detail` carries either the worst measured margin
// (pass) or the reason for failure.
struct ItemResult {
  int number = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

inline constexpr int kItemCount = 13;

const char* item_title(int number);

// Runs a single item (1-based). Exceptions are caught and reported as
// failures. Every item is deterministic: fixed seeds, no wall-clock input.
ItemResult run_item(int number);

std::vector<ItemResult> run_all();

}  // namespace tsvolterra::selftest
