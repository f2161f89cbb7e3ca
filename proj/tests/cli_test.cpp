#include <gtest/gtest.h>
TEST(CliPlaceholder, Compiles) { SUCCEED(); }
