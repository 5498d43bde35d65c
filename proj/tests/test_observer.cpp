#include "doctest.h"

TEST_SUITE("observer") {}
