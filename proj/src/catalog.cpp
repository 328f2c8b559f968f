#include "rbv/catalog.hpp"

#include <cctype>
#include <stdexcept>

namespace rbv {

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

FeatureCatalog::FeatureCatalog() {
    entries_ = {
        {1, "ALT", "U/L"},
        {2, "AST", "U/L"},
        {3, "Albumin", "g/L"},
        {4, "ALP", "U/L"},
        {5, "Amylase", "U/L"},
        {6, "CK-MB", "U/L"},
        {7, "D-Bil", "mg/dL"},
        {8, "Glucose", "mg/dL"},
        {9, "Creatinine", "mg/dL"},
        {10, "CK", "U/L"},
        {11, "LDH", "U/L"},
        {12, "eGFR", ""},
        {13, "UA", "mg/dL"},
        {14, "BASO", "10^3/uL"},
        {15, "EOS", "10^3/uL"},
        {16, "HCT", "%"},
        {17, "HGB", "g/L"},
        {18, "LYM", "10^3/uL"},
        {19, "MCH", "pg"},
        {20, "MCHC", "g/dL"},
        {21, "MCV", "fL"},
        {22, "MONO", "10^3/uL"},
        {23, "MPV", "fL"},
        {24, "NEU", "10^3/uL"},
        {25, "PLT", "10^3/uL"},
        {26, "RBC", "10^6/uL"},
        {27, "RDW", "%"},
        {28, "WBC", "10^3/uL"},
        {29, "CRP", "mg/L"},
        {30, "D-dimer", "ug/L"},
        {31, "Ferritin", "ug/L"},
        {32, "Fibrinogen", "mg/dL"},
        {33, "INR", ""},
        {34, "PT", "Sec"},
        {35, "PCT", "ng/mL"},
        {36, "ESR", "mm/hr"},
        {37, "Troponin", "ng/L"},
        {38, "aPTT", "Sec"},
    };
}

const FeatureCatalog& FeatureCatalog::instance() {
    static const FeatureCatalog catalog;
    return catalog;
}

const CatalogEntry& FeatureCatalog::by_no(int feature_no) const {
    if (feature_no < 1 || feature_no > static_cast<int>(entries_.size())) {
        throw std::out_of_range("feature_no outside catalog: " + std::to_string(feature_no));
    }
    return entries_[static_cast<std::size_t>(feature_no - 1)];
}

std::optional<int> FeatureCatalog::find_no(std::string_view name) const {
    const std::string key = to_lower_ascii(name);
    for (const auto& e : entries_) {
        if (to_lower_ascii(e.name) == key) return e.feature_no;
    }
    // Accept the spelled-out name used in some exports of this panel.
    if (key == "procalcitonin") return 35;
    return std::nullopt;
}

}  // namespace rbv
