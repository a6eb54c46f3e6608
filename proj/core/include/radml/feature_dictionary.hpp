#pragma once

#include <string>
#include <vector>

namespace radml {

/// The canonical imaging feature dictionary: 564 names in a fixed order.
///
/// Family layout (name prefix, count):
///   histogram  hf_        13
///   shape      sf_        35
///   orientation of_        9
///   glcm       tf_GLCM*  144   6 features x {summed, per-slice mean, per-slice std}
///                               x 4 angles x 2 distances
///   glszm      tf_GLSZM_  16
///   glrlm      tf_GLRLM_  16
///   gldm       tf_GLDM_   14
///   ngtdm      tf_NGTDM_   5
///   lbp        tf_LBP_    39   13 statistics x 3 (radius, neighbor) setups
///   gabor      tf_Gabor_ 156   13 statistics x 3 frequencies x 4 angles
///   log        tf_LoG_    39   13 statistics x 3 Gaussian widths
///   vessel     vf_Frangi_ 39   13 statistics x {full, edge, inner} region
///   phase      phasef_    39   13 statistics x {monogenic, phasecong, phasesym}
const std::vector<std::string>& canonical_feature_names();

/// The 13 imaging family tags, in canonical order.
const std::vector<std::string>& imaging_group_tags();

/// All selectable group tags: the 13 imaging families, the clinical
/// pseudo-groups (age, sex, location) and the volume sub-group.
const std::vector<std::string>& all_group_tags();

/// Primary group tag of a feature column (imaging family, or age/sex/location
/// for clinical columns). Throws DataError for unknown names.
const std::string& group_of(const std::string& feature_name);

/// The volume sub-group: the physical-volume column. It is part of the shape
/// family but can be selected on its own (`--groups volume`).
bool in_volume_subgroup(const std::string& feature_name);

/// Number of canonical features carrying the given imaging family tag.
std::size_t family_count(const std::string& tag);

/// The 13 first-order statistic names shared by histogram and filter families.
const std::vector<std::string>& stat13_names();

/// Clinical column names.
inline const char* kAgeColumn = "semf_age";
inline const char* kSexColumn = "semf_sex";
inline const char* kLocationColumnPrefix = "semf_location_";

} // namespace radml
