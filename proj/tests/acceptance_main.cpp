// Acceptance gate: runs the ten release criteria and prints one PASS/FAIL
// line per criterion. Exit status is zero exactly when every criterion holds.

#include <iostream>

#include "looptwist/verify.hpp"

int main() {
  bool all = true;
  for (const looptwist::CriterionResult& c : looptwist::run_acceptance()) {
    std::cout << "criterion-" << c.index << "\t"
              << (c.passed ? "PASS" : "FAIL") << "\t" << c.name;
    if (!c.detail.empty()) std::cout << "\t" << c.detail;
    std::cout << "\n" << std::flush;
    all = all && c.passed;
  }
  return all ? 0 : 1;
}
