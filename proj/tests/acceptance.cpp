// One line per acceptance criterion; exit status 0 only when every selected criterion passes.
#include <cstdlib>
#include <iostream>

#include "prekahler/parse.hpp"
#include "prekahler/verify.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> only(argv + 1, argv + argc);
  try {
    auto results = pk::run_verify(only, 0);
    std::cout << pk::verify_lines(results);
    int passed = 0;
    for (const auto& r : results) passed += r.pass;
    std::cout << passed << "/" << results.size() << " criteria pass\n";
    return passed == static_cast<int>(results.size()) ? EXIT_SUCCESS : EXIT_FAILURE;
  } catch (const pk::Error& e) {
    std::cerr << e.what() << "\n";
    return e.exit_code();
  }
}
