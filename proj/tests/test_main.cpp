#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "htdbu/parallel.hpp"

int main(int argc, char** argv) {
  htdbu::configure_workers();
  doctest::Context context;
  context.applyCommandLine(argc, argv);
  return context.run();
}
