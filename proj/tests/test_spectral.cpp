#include "doctest.h"

TEST_SUITE("spectral") {}
