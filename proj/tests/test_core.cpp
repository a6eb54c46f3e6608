#include "doctest.h"

#include "radml/csv_io.hpp"
#include "radml/feature_dictionary.hpp"
#include "radml/mhd_io.hpp"
#include "radml/rng.hpp"
#include "radml/types.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

using namespace radml;

namespace {

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "radml_test_core";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("mhd round trip is bit identical") {
    ImageVolume v;
    v.dims = {2, 2, 1};
    v.spacing = {1.0, 1.0, 1.0};
    v.voxels = {0, 1, 2, 3};
    v.element_kind = ElementKind::Short;

    auto path = (temp_dir() / "tiny.mhd").string();
    write_image(v, path);
    ImageVolume back = read_image(path);
    CHECK(back.dims == v.dims);
    CHECK(back.spacing == v.spacing);
    CHECK(back.voxels == v.voxels);
    CHECK(back.element_kind == ElementKind::Short);

    SUBCASE("float volumes round trip too") {
        v.element_kind = ElementKind::Float;
        v.voxels = {0.5, -12.25, 3.75, 100.125};
        write_image(v, path);
        ImageVolume back2 = read_image(path);
        CHECK(back2.voxels == v.voxels);
    }
}

TEST_CASE("mhd element count mismatch is rejected") {
    auto dir = temp_dir();
    auto hdr = dir / "bad.mhd";
    {
        std::ofstream out(hdr);
        out << "ObjectType = Image\nNDims = 3\nDimSize = 2 2 2\n"
            << "ElementSpacing = 1 1 1\nElementType = MET_UCHAR\nElementDataFile = bad.raw\n";
    }
    {
        std::ofstream raw(dir / "bad.raw", std::ios::binary);
        raw << "1234"; // only 4 of the 8 required voxels
    }
    CHECK_THROWS_AS(read_image(hdr.string()), DataError);
}

TEST_CASE("mhd missing header key is rejected") {
    auto hdr = temp_dir() / "nokeys.mhd";
    {
        std::ofstream out(hdr);
        out << "ObjectType = Image\nNDims = 3\nDimSize = 1 1 1\nElementDataFile = LOCAL\nx";
    }
    CHECK_THROWS_AS(read_image(hdr.string()), DataError);
}

TEST_CASE("mhd LOCAL payload is readable") {
    auto hdr = temp_dir() / "local.mhd";
    {
        std::ofstream out(hdr, std::ios::binary);
        out << "NDims = 3\nDimSize = 2 1 1\nElementSpacing = 1 2 3\n"
            << "ElementType = MET_UCHAR\nElementDataFile = LOCAL\n";
        unsigned char payload[2] = {7, 0};
        out.write(reinterpret_cast<const char*>(payload), 2);
    }
    auto img = read_image(hdr.string());
    CHECK(img.voxels == std::vector<double>{7.0, 0.0});
    CHECK(img.spacing[2] == 3.0);

    auto mask = read_mask(hdr.string());
    CHECK(mask.at(0, 0, 0));
    CHECK_FALSE(mask.at(1, 0, 0));
}

TEST_CASE("unsupported element type is rejected") {
    auto hdr = temp_dir() / "unsup.mhd";
    {
        std::ofstream out(hdr);
        out << "NDims = 3\nDimSize = 1 1 1\nElementSpacing = 1 1 1\n"
            << "ElementType = MET_DOUBLE\nElementDataFile = LOCAL\n12345678";
    }
    CHECK_THROWS_AS(read_image(hdr.string()), DataError);
}

TEST_CASE("image/mask pairing checks dims and spacing") {
    ImageVolume img;
    img.dims = {2, 2, 1};
    img.voxels.assign(4, 0.0);
    RoiMask mask;
    mask.dims = {2, 2, 1};
    mask.voxels = {1, 0, 0, 0};
    CHECK_NOTHROW(check_paired(img, mask));
    mask.spacing = {2.0, 1.0, 1.0};
    CHECK_THROWS_AS(check_paired(img, mask), DataError);
    mask.spacing = {1.0, 1.0, 1.0};
    mask.dims = {2, 1, 2};
    CHECK_THROWS_AS(check_paired(img, mask), DataError);
}

TEST_CASE("feature table csv round trip") {
    FeatureTable t({"p1"}, {"a", "b", "c"});
    t.set(0, 0, 1.0);
    t.set(0, 1, -2.5e-7);
    t.set(0, 2, 3.14159265358979);
    auto path = (temp_dir() / "t.csv").string();
    write_feature_table(t, path);
    auto back = read_feature_table(path);
    REQUIRE(back.n_rows() == 1);
    REQUIRE(back.n_cols() == 3);
    CHECK(back.feature_names() == t.feature_names());
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(back.get(0, c) == doctest::Approx(t.get(0, c)).epsilon(1e-12));
    }
}

TEST_CASE("missing values survive csv round trip as missing") {
    FeatureTable t({"p1", "p2"}, {"a"});
    t.set(0, 0, missing_value());
    t.set(1, 0, 5.0);
    auto path = (temp_dir() / "nan.csv").string();
    write_feature_table(t, path);
    auto back = read_feature_table(path);
    CHECK(is_missing(back.get(0, 0)));
    CHECK(back.get(1, 0) == 5.0);
}

TEST_CASE("duplicate patient id in csv is rejected") {
    auto path = temp_dir() / "dup.csv";
    {
        std::ofstream out(path);
        out << "patient_id,a\np1,1\np1,2\n";
    }
    CHECK_THROWS_AS(read_feature_table(path.string()), DataError);
}

TEST_CASE("header/row arity mismatch is rejected") {
    auto path = temp_dir() / "arity.csv";
    {
        std::ofstream out(path);
        out << "patient_id,a,b\np1,1\n";
    }
    CHECK_THROWS_AS(read_feature_table(path.string()), DataError);
}

TEST_CASE("manifest round trip") {
    std::vector<PatientRecord> records(2);
    records[0].id = "p0";
    records[0].label = 1;
    records[0].age = 64.0;
    records[0].sex = 'F';
    records[0].location = "stomach";
    records[0].batch = "S0|thin";
    records[0].image_path = "img0.mhd";
    records[0].mask_path = "msk0.mhd";
    records[1].id = "p1";
    records[1].label = 0;
    // everything optional missing

    auto path = (temp_dir() / "manifest.csv").string();
    write_manifest(records, path);
    auto back = read_manifest(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].id == "p0");
    CHECK(back[0].label == 1);
    CHECK(back[0].age.value() == 64.0);
    CHECK(back[0].sex.value() == 'F');
    CHECK(back[0].location.value() == "stomach");
    CHECK(back[0].batch.value() == "S0|thin");
    // relative paths resolve against the manifest directory
    CHECK(std::filesystem::path(back[0].image_path).is_absolute());
    CHECK_FALSE(back[1].age.has_value());
    CHECK_FALSE(back[1].sex.has_value());
    CHECK_FALSE(back[1].batch.has_value());
}

TEST_CASE("canonical feature dictionary has 564 entries with the documented family counts") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& names = canonical_feature_names();
    CHECK(names.size() == 564);

    CHECK(family_count("histogram") == 13);
    CHECK(family_count("shape") == 35);
    CHECK(family_count("orientation") == 9);
    CHECK(family_count("glcm") == 144);
    CHECK(family_count("glszm") == 16);
    CHECK(family_count("glrlm") == 16);
    CHECK(family_count("gldm") == 14);
    CHECK(family_count("ngtdm") == 5);
    CHECK(family_count("lbp") == 39);
    CHECK(family_count("gabor") == 156);
    CHECK(family_count("log") == 39);
    CHECK(family_count("vessel") == 39);
    CHECK(family_count("phase") == 39);

    // injective
    std::set<std::string> unique(names.begin(), names.end());
    CHECK(unique.size() == names.size());

    // every name resolves to a group
    for (const auto& n : names) CHECK_NOTHROW(group_of(n));
    CHECK(group_of("tf_Gabor_mean_F0.2_A0.79") == "gabor");
    CHECK(group_of("vf_Frangi_inner_energy_SR(1.0. 10.0)_SS2.0") == "vessel");
    CHECK(group_of("semf_age") == "age");
    CHECK(group_of("semf_location_stomach") == "location");
    CHECK_THROWS_AS(group_of("not_a_feature"), DataError);

    CHECK(in_volume_subgroup("sf_volume"));
    CHECK_FALSE(in_volume_subgroup("sf_volume_mesh"));

    const auto elapsed = std::chrono::steady_clock::now() - t0;
    CHECK(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() < 1000);
}

TEST_CASE("rng streams are deterministic and independent") {
    Rng a = Rng::derive(42, "unit", {1});
    Rng b = Rng::derive(42, "unit", {1});
    Rng c = Rng::derive(42, "unit", {2});
    for (int i = 0; i < 16; ++i) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
    }
    CHECK(a.next_u64() != c.next_u64());

    Rng d = Rng::derive(42, "unit", {3});
    double mean = 0.0;
    for (int i = 0; i < 10000; ++i) mean += d.normal();
    mean /= 10000;
    CHECK(std::abs(mean) < 0.05);
}
