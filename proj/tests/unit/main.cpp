#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "hardatt/log.hpp"

int main(int argc, char** argv) {
  hardatt::set_log_level(hardatt::LogLevel::kWarn);
  doctest::Context context(argc, argv);
  return context.run();
}
