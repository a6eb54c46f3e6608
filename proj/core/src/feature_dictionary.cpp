#include "radml/feature_dictionary.hpp"

#include "radml/common.hpp"

#include <mutex>
#include <unordered_map>

namespace radml {

namespace {

const std::vector<std::string> kStat13 = {
    "min",  "max",  "mean",   "median",        "std",     "skewness", "kurtosis",
    "peak", "peak_position", "range", "energy", "quartile_range", "entropy"};

const std::vector<std::string> kGlcmFeatures = {"contrast", "dissimilarity", "homogeneity",
                                                "ASM",      "energy",        "correlation"};
const std::vector<std::string> kGlcmDistances = {"1.0", "3.0"};
const std::vector<std::string> kGlcmAngles = {"0.0", "0.79", "1.57", "2.36"};

const std::vector<std::string> kGlszm = {
    "GrayLevelNonUniformity",     "GrayLevelNonUniformityNormalized",
    "GrayLevelVariance",          "HighGrayLevelZoneEmphasis",
    "LargeAreaEmphasis",          "LargeAreaHighGrayLevelEmphasis",
    "LargeAreaLowGrayLevelEmphasis", "LowGrayLevelZoneEmphasis",
    "SizeZoneNonUniformity",      "SizeZoneNonUniformityNormalized",
    "SmallAreaEmphasis",          "SmallAreaHighGrayLevelEmphasis",
    "SmallAreaLowGrayLevelEmphasis", "ZoneEntropy",
    "ZonePercentage",             "ZoneVariance"};

const std::vector<std::string> kGlrlm = {
    "GrayLevelNonUniformity",    "GrayLevelNonUniformityNormalized",
    "GrayLevelVariance",         "HighGrayLevelRunEmphasis",
    "LongRunEmphasis",           "LongRunHighGrayLevelEmphasis",
    "LongRunLowGrayLevelEmphasis", "LowGrayLevelRunEmphasis",
    "RunEntropy",                "RunLengthNonUniformity",
    "RunLengthNonUniformityNormalized", "RunPercentage",
    "RunVariance",               "ShortRunEmphasis",
    "ShortRunHighGrayLevelEmphasis", "ShortRunLowGrayLevelEmphasis"};

const std::vector<std::string> kGldm = {
    "DependenceEntropy",       "DependenceNonUniformity",
    "DependenceNonUniformityNormalized", "DependenceVariance",
    "GrayLevelNonUniformity",  "GrayLevelVariance",
    "HighGrayLevelEmphasis",   "LargeDependenceEmphasis",
    "LargeDependenceHighGrayLevelEmphasis", "LargeDependenceLowGrayLevelEmphasis",
    "LowGrayLevelEmphasis",    "SmallDependenceEmphasis",
    "SmallDependenceHighGrayLevelEmphasis", "SmallDependenceLowGrayLevelEmphasis"};

const std::vector<std::string> kNgtdm = {"busyness", "coarseness", "complexity", "contrast",
                                         "strength"};

const std::vector<std::pair<int, int>> kLbpSetups = {{1, 8}, {2, 12}, {3, 16}};
const std::vector<std::string> kGaborFrequencies = {"0.05", "0.2", "0.5"};
const std::vector<int> kLogSigmas = {1, 5, 10};
const std::vector<std::string> kVesselRegions = {"full", "edge", "inner"};
const std::vector<std::string> kPhaseImages = {"monogenic", "phasecong", "phasesym"};

struct Dictionary {
    std::vector<std::string> names;
    std::unordered_map<std::string, std::string> groups;
    std::unordered_map<std::string, std::size_t> counts;

    void add(const std::string& name, const std::string& group) {
        names.push_back(name);
        groups.emplace(name, group);
        ++counts[group];
    }
};

Dictionary build_dictionary() {
    Dictionary d;

    for (const auto& s : kStat13) d.add("hf_" + s, "histogram");

    for (const char* base : {"compactness", "radial_distance", "roughness", "convexity",
                             "circular_variance", "principal_axes_ratio", "elliptic_variance",
                             "solidity"}) {
        d.add(std::string("sf_") + base + "_avg", "shape");
        d.add(std::string("sf_") + base + "_std", "shape");
    }
    for (const char* agg : {"avg", "std", "min", "max"}) {
        d.add(std::string("sf_area_") + agg + "_2D", "shape");
    }
    d.add("sf_volume_count", "shape");
    d.add("sf_volume_mesh", "shape");
    d.add("sf_volume", "shape");
    d.add("sf_elongation", "shape");
    d.add("sf_flatness", "shape");
    d.add("sf_least_axis_length", "shape");
    d.add("sf_major_axis_length", "shape");
    d.add("sf_minor_axis_length", "shape");
    d.add("sf_max_diameter_3D", "shape");
    d.add("sf_shape_Maximum2DDiameterRow", "shape");
    d.add("sf_shape_Maximum2DDiameterColumn", "shape");
    d.add("sf_shape_Maximum2DDiameterSlice", "shape");
    d.add("sf_sphericity", "shape");
    d.add("sf_surface_area", "shape");
    d.add("sf_surface_volume_ratio", "shape");

    for (const char* axis : {"x", "y", "z"}) d.add(std::string("of_theta_") + axis, "orientation");
    for (const char* axis : {"x", "y", "z"}) d.add(std::string("of_COM_Index_") + axis, "orientation");
    for (const char* axis : {"x", "y", "z"}) d.add(std::string("of_COM_") + axis, "orientation");

    for (const auto& f : kGlcmFeatures) {
        for (const auto& dist : kGlcmDistances) {
            for (const auto& ang : kGlcmAngles) {
                const std::string suffix = f + "d" + dist + "A" + ang;
                d.add("tf_GLCM_" + suffix, "glcm");
                d.add("tf_GLCMMS_" + suffix + "mean", "glcm");
                d.add("tf_GLCMMS_" + suffix + "std", "glcm");
            }
        }
    }

    for (const auto& f : kGlszm) d.add("tf_GLSZM_" + f, "glszm");
    for (const auto& f : kGlrlm) d.add("tf_GLRLM_" + f, "glrlm");
    for (const auto& f : kGldm) d.add("tf_GLDM_" + f, "gldm");
    for (const auto& f : kNgtdm) d.add("tf_NGTDM_" + f, "ngtdm");

    for (const auto& [radius, neighbors] : kLbpSetups) {
        for (const auto& s : kStat13) {
            d.add("tf_LBP_" + s + "_R" + std::to_string(radius) + "P" + std::to_string(neighbors),
                  "lbp");
        }
    }
    for (const auto& freq : kGaborFrequencies) {
        for (const auto& ang : kGlcmAngles) {
            for (const auto& s : kStat13) {
                d.add("tf_Gabor_" + s + "_F" + freq + "_A" + ang, "gabor");
            }
        }
    }
    for (int sigma : kLogSigmas) {
        for (const auto& s : kStat13) {
            d.add("tf_LoG_" + s + "_sigma" + std::to_string(sigma), "log");
        }
    }
    for (const auto& region : kVesselRegions) {
        for (const auto& s : kStat13) {
            d.add("vf_Frangi_" + region + "_" + s + "_SR(1.0. 10.0)_SS2.0", "vessel");
        }
    }
    for (const auto& img : kPhaseImages) {
        for (const auto& s : kStat13) {
            d.add("phasef_" + img + "_" + s, "phase");
        }
    }

    return d;
}

const Dictionary& dictionary() {
    static const Dictionary d = build_dictionary();
    return d;
}

} // namespace

const std::vector<std::string>& canonical_feature_names() { return dictionary().names; }

const std::vector<std::string>& imaging_group_tags() {
    static const std::vector<std::string> tags = {"histogram", "shape", "orientation", "glcm",
                                                  "glszm",     "glrlm", "gldm",        "ngtdm",
                                                  "lbp",       "gabor", "log",         "vessel",
                                                  "phase"};
    return tags;
}

const std::vector<std::string>& all_group_tags() {
    static const std::vector<std::string> tags = [] {
        std::vector<std::string> t = imaging_group_tags();
        t.push_back("age");
        t.push_back("sex");
        t.push_back("location");
        t.push_back("volume");
        return t;
    }();
    return tags;
}

const std::string& group_of(const std::string& feature_name) {
    static const std::string kAge = "age", kSex = "sex", kLocation = "location";
    const auto& groups = dictionary().groups;
    auto it = groups.find(feature_name);
    if (it != groups.end()) return it->second;
    if (feature_name == kAgeColumn) return kAge;
    if (feature_name == kSexColumn) return kSex;
    if (feature_name.rfind(kLocationColumnPrefix, 0) == 0) return kLocation;
    throw DataError("unknown feature name: " + feature_name);
}

bool in_volume_subgroup(const std::string& feature_name) { return feature_name == "sf_volume"; }

std::size_t family_count(const std::string& tag) {
    auto it = dictionary().counts.find(tag);
    return it == dictionary().counts.end() ? 0 : it->second;
}

const std::vector<std::string>& stat13_names() { return kStat13; }

} // namespace radml
