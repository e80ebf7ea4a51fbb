#pragma once

#include <stdexcept>
#include <string>

// Internal invariant check; failures are programming errors surfaced as
// exceptions so tests and audits can catch them.
#define DMSF_CHECK(cond, msg)                                          \
  do {                                                                 \
    if (!(cond)) throw std::logic_error(std::string("invariant: ") + (msg)); \
  } while (0)
