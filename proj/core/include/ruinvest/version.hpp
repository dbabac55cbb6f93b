#pragma once

namespace ruinvest {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ruinvest
