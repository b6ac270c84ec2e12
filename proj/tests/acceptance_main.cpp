// Verification suite as a standalone binary: one line per criterion,
// nonzero exit when any fails.

#include <iostream>

#include "freqbin/acceptance.hpp"

int main() {
  return freqbin::acceptance::print_acceptance(std::cout) ? 0 : 1;
}
