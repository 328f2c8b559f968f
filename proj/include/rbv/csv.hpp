#pragma once

#include <string>

#include "rbv/table.hpp"

namespace rbv {

// Reads a UTF-8 comma-separated file with a header row. Feature columns are
// resolved case-insensitively against the catalog and reordered to catalog
// order; the label column accepts 0/1 or the literals "survived" /
// "non-survived". Empty cells and the tokens NA / NaN / null (any case) are
// flagged in the missing mask and left as NaN, not imputed.
FeatureTable load_csv(const std::string& path, const std::string& label_column = "label");

// Writes the same schema back out. Doubles are printed with shortest
// round-trip formatting, so load -> write -> load is exact.
void write_csv(const FeatureTable& table, const std::string& path,
               const std::string& label_column = "label");

// Shortest round-trip decimal formatting for a double (std::to_chars).
std::string format_double(double v);

}  // namespace rbv
