#pragma once

// Published formula sizes (constraints, variables) for encodings 1, 2 and 3.

#include <cstdint>
#include <vector>

#include "mcmpbs/encoder.hpp"

namespace oracle {

struct SizeRow {
  const char* id;
  int ops;
  std::vector<int64_t> targets;
  uint64_t constraints[3];
  uint64_t variables[3];
};

inline const std::vector<SizeRow>& size_rows() {
  static const std::vector<int64_t> a{15783, 47351, 1345, 111111, 9871};
  static const std::vector<int64_t> b{1571, 3579, 7777, 1351, 123, 9999, 135, 767};
  static const std::vector<int64_t> f{1701, 709, 1015, 1269, 1203, 683, 201, 565, 1653, 681, 17, 261, 4621, 3435};
  static const std::vector<SizeRow> rows{
      {"01", 5, {731951}, {156096, 46243, 46243}, {11243, 3620, 1840}},
      {"02", 4, {731951}, {81762, 24920, 24920}, {6075, 2043, 1103}},
      {"03", 5, {33951}, {105936, 33299, 33299}, {9103, 2932, 1508}},
      {"04", 3, {33951}, {23837, 8027, 8027}, {2214, 803, 483}},
      {"05", 12, a, {1469379, 417306, 417306}, {111392, 32552, 14685}},
      {"06", 11, a, {1141533, 326275, 326275}, {86924, 25526, 11586}},
      {"07", 15, b, {2012698, 594926, 594926}, {175694, 50759, 22941}},
      {"08", 13, b, {1327081, 395824, 395824}, {116501, 33866, 15414}},
      {"09", 12, b, {1051800, 315408, 315408}, {92642, 27032, 12360}},
      {"10", 17, f, {2557759, 767018, 767018}, {234851, 67439, 30480}},
      {"11", 16, f, {2142844, 644749, 644749}, {197121, 56715, 25684}},
  };
  return rows;
}

/// Settings under which every published size is reproduced exactly: the
/// defaults, except that encoding 1 leaves 2^i - 2^j unguarded.
inline mcmpbs::EncodingConfig matching_profile(int variant, int ops) {
  mcmpbs::EncodingConfig c;
  c.variant = mcmpbs::variant_from_int(variant);
  c.ops = ops;
  if (variant == 1) c.improvements.nonzero_sub = false;
  return c;
}

}  // namespace oracle
