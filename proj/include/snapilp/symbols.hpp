#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace snapilp {

// Interned identifier. Ids are process-wide and stable for the process lifetime;
// anything that must be reproducible across runs orders by name, never by id.
using Symbol = std::uint32_t;

Symbol intern(std::string_view name);
const std::string& symbol_name(Symbol s);

}  // namespace snapilp
