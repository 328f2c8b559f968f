#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rbv {

struct CatalogEntry {
    int feature_no;  // 1..38
    std::string name;
    std::string unit;
};

// The fixed numbering of the 38 routine blood-value features. The order and
// names are part of every file format this project reads or writes.
class FeatureCatalog {
public:
    static const FeatureCatalog& instance();

    const std::vector<CatalogEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    const CatalogEntry& by_no(int feature_no) const;
    // Case-insensitive name lookup; returns nullopt for unknown names.
    std::optional<int> find_no(std::string_view name) const;

private:
    FeatureCatalog();
    std::vector<CatalogEntry> entries_;
};

std::string to_lower_ascii(std::string_view s);

}  // namespace rbv
