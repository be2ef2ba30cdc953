#pragma once

// Random assertions mixing pure facts, cells and list predicates, for
// produce/consume round trips. Spatial atoms use distinct addresses.

#include <random>
#include <string>
#include <vector>

namespace swing::test {

inline std::string random_assertion(std::mt19937 &rng) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  const std::vector<std::string> vars = {"#a", "#b", "#c", "#d"};
  auto var = [&] { return vars[pick(4)]; };
  std::vector<std::string> atoms;
  int n = 1 + pick(5), cells = 0, lists = 0;
  for (int i = 0; i < n; ++i) {
    switch (pick(9)) {
    case 0: atoms.push_back("(" + var() + " == " + std::to_string(pick(3)) + ")"); break;
    case 1: atoms.push_back("(" + var() + " <= " + var() + ")"); break;
    case 2: atoms.push_back("(" + var() + " + 1 == " + var() + ")"); break;
    case 3: atoms.push_back("(" + var() + " == [" + var() + ", " + var() + "])"); break;
    case 4: atoms.push_back("(len(" + var() + ") == " + std::to_string(pick(3)) + ")"); break;
    case 5: atoms.push_back("(not (" + var() + " == " + var() + "))"); break;
    case 6: atoms.push_back("(#p" + std::to_string(cells++) + " -> " + var() + ", " + var() + ")"); break;
    case 7: atoms.push_back("list(#q" + std::to_string(lists++) + ", " + var() + ")"); break;
    default: atoms.push_back("(" + var() + " is Nat)"); break;
    }
  }
  std::string text;
  for (std::size_t i = 0; i < atoms.size(); ++i)
    text += (i ? " * " : "") + atoms[i];
  return text;
}

} // namespace swing::test
