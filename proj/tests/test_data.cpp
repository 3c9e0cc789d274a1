#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "proboost/contaminate.hpp"
#include "proboost/csv.hpp"
#include "proboost/errors.hpp"
#include "proboost/idx.hpp"
#include "proboost/synthetic.hpp"

using namespace proboost;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

RawImageSet tiny_set() {
    RawImageSet set;
    set.count = 4;
    set.height = 3;
    set.width = 2;
    set.pixels = {10, 20, 30, 40, 50, 60,  0,  0,  0,   255, 255, 255,
                  1,  2,  3,  4,  5,  6,   90, 91, 92,  93,  94,  95};
    set.labels = {0, 1, 0, 1};
    return set;
}

}  // namespace

TEST_CASE("idx: round trip write -> read is exact") {
    const auto set = tiny_set();
    const std::string img = temp_path("pb_idx_img.bin");
    const std::string lbl = temp_path("pb_idx_lbl.bin");
    save_idx(set, img, lbl);
    const auto loaded = load_idx(img, lbl);
    CHECK(loaded.count == set.count);
    CHECK(loaded.height == set.height);
    CHECK(loaded.width == set.width);
    CHECK(loaded.pixels == set.pixels);
    CHECK(loaded.labels == set.labels);
    std::remove(img.c_str());
    std::remove(lbl.c_str());
}

TEST_CASE("idx: header 00000803 with dims 2,2,2 and 8 payload bytes") {
    const std::string img = temp_path("pb_idx_hdr_img.bin");
    const std::string lbl = temp_path("pb_idx_hdr_lbl.bin");
    {
        std::ofstream out(img, std::ios::binary);
        const unsigned char bytes[] = {0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2,
                                       0, 0, 0, 2, 1, 2, 3, 4, 5, 6, 7, 8};
        out.write(reinterpret_cast<const char*>(bytes), sizeof(bytes));
    }
    {
        std::ofstream out(lbl, std::ios::binary);
        const unsigned char bytes[] = {0, 0, 8, 1, 0, 0, 0, 2, 7, 9};
        out.write(reinterpret_cast<const char*>(bytes), sizeof(bytes));
    }
    const auto set = load_idx(img, lbl);
    CHECK(set.count == 2);
    CHECK(set.height == 2);
    CHECK(set.width == 2);
    CHECK(set.pixels == std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6, 7, 8});
    CHECK(set.labels == std::vector<int>{7, 9});
    std::remove(img.c_str());
    std::remove(lbl.c_str());
}

TEST_CASE("idx: wrong magic, truncation, and count mismatch rejected") {
    const auto set = tiny_set();
    const std::string img = temp_path("pb_idx_bad_img.bin");
    const std::string lbl = temp_path("pb_idx_bad_lbl.bin");
    save_idx(set, img, lbl);

    // label file in the image position: wrong magic
    CHECK_THROWS_AS(load_idx(lbl, lbl), FormatError);

    // truncated image payload
    {
        std::ifstream in(img, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
        bytes.resize(bytes.size() - 3);
        std::ofstream out(img, std::ios::binary);
        out << bytes;
    }
    CHECK_THROWS_AS(load_idx(img, lbl), FormatError);

    // count mismatch between labels and images
    save_idx(set, img, lbl);
    auto fewer = set;
    fewer.count = 3;
    fewer.pixels.resize(3 * 6);
    fewer.labels.resize(3);
    const std::string lbl3 = temp_path("pb_idx_lbl3.bin");
    save_idx(fewer, temp_path("pb_idx_img3.bin"), lbl3);
    CHECK_THROWS_AS(load_idx(img, lbl3), FormatError);

    std::remove(img.c_str());
    std::remove(lbl.c_str());
}

TEST_CASE("csv: iris file loads with selected feature columns") {
    const std::string iris = std::string(PROBOOST_SOURCE_DIR) + "/data/iris.csv";
    const Dataset d = load_csv_labeled(iris, {0, 2});
    CHECK(d.size() == 150);
    CHECK(d.n_classes == 3);
    CHECK(d.sample_shape() == std::vector<std::size_t>{2});
    // first row of the classic file: sepal length 5.1, petal length 1.4
    CHECK(d.features.at(0, 0) == doctest::Approx(5.1));
    CHECK(d.features.at(0, 1) == doctest::Approx(1.4));
    const auto counts = d.class_counts();
    CHECK(counts == std::vector<std::size_t>{50, 50, 50});
}

TEST_CASE("csv: header skipping, string labels, and error reporting") {
    const std::string path = temp_path("pb_csv.csv");
    {
        std::ofstream out(path);
        out << "f1,f2,label\n";
        out << "1.0,2.0,versicolor\n";
        out << "3.0,4.0,setosa\n";
        out << "5.0,6.0,setosa\n";
    }
    const Dataset d = load_csv_labeled(path);
    CHECK(d.size() == 3);
    CHECK(d.n_classes == 2);
    // lexicographic mapping: setosa -> 0, versicolor -> 1
    CHECK(d.labels == std::vector<int>{1, 0, 0});

    {
        std::ofstream out(path);
        out << "1.0,oops,0\n";
    }
    CHECK_THROWS_AS(load_csv_labeled(path), FormatError);

    {
        std::ofstream out(path);
    }
    CHECK_THROWS_AS(load_csv_labeled(path), FormatError);
    std::remove(path.c_str());
}

TEST_CASE("contaminate_awgn: zero variance shifts every pixel by the mean") {
    auto set = tiny_set();
    ContaminationSpec spec;
    spec.kind = ContaminationSpec::Kind::awgn;
    spec.awgn_variance = 0.0;
    PrngStream stream(5);
    const Tensor out = contaminate_awgn(set, spec, stream);
    CHECK(out.shape() == std::vector<std::size_t>{4, 1, 3, 2});
    for (std::size_t i = 0; i < set.pixels.size(); ++i) {
        const double expected =
            std::min(static_cast<double>(set.pixels[i]) + 127.5, 255.0) / 255.0;
        CHECK(out[i] == doctest::Approx(expected));
    }
}

TEST_CASE("contaminate_awgn: output always lies in [0, 1]") {
    PrngStream gen(17);
    const auto set = make_synthetic_image_set(60, 8, 8, 3, gen);
    ContaminationSpec spec;
    PrngStream stream(6);
    const Tensor out = contaminate_awgn(set, spec, stream);
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i] >= 0.0);
        CHECK(out[i] <= 1.0);
    }
}

TEST_CASE("contaminate_awgn: fixed seed reproduces identical tensors") {
    const auto set = tiny_set();
    ContaminationSpec spec;
    PrngStream s1(99), s2(99);
    const Tensor a = contaminate_awgn(set, spec, s1);
    const Tensor b = contaminate_awgn(set, spec, s2);
    CHECK(a.values() == b.values());
}

TEST_CASE("contaminate_superimpose: same-class pairing, logged and exhaustive") {
    PrngStream gen(23);
    const auto base = make_synthetic_image_set(40, 6, 6, 4, gen);
    const auto donor = make_synthetic_image_set(32, 6, 6, 4, gen);
    ContaminationSpec spec;
    spec.kind = ContaminationSpec::Kind::superimpose;
    spec.fraction = 0.25;
    PrngStream stream(7);
    std::vector<std::pair<int, int>> log;
    const Tensor out = contaminate_superimpose(base, donor, spec, stream, &log);
    CHECK(log.size() == base.count / 4);
    for (const auto& [base_label, donor_label] : log) {
        CHECK(base_label == donor_label);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i] >= 0.0);
        CHECK(out[i] <= 1.0);
    }
}

TEST_CASE("contaminate_superimpose: tiny fraction selects nobody; min==max -> zeros") {
    RawImageSet base;
    base.count = 2;
    base.height = 2;
    base.width = 2;
    base.pixels = {10, 20, 30, 40, 7, 7, 7, 7};  // second image is constant
    base.labels = {0, 0};
    RawImageSet donor = base;
    ContaminationSpec spec;
    spec.kind = ContaminationSpec::Kind::superimpose;
    spec.fraction = 0.1;  // floor(0.2) = 0 selected
    PrngStream stream(3);
    const Tensor out = contaminate_superimpose(base, donor, spec, stream);
    // plain per-image min-max of base
    CHECK(out[0] == doctest::Approx(0.0));
    CHECK(out[3] == doctest::Approx(1.0));
    // constant image normalizes to all zeros
    for (std::size_t i = 4; i < 8; ++i) CHECK(out[i] == 0.0);
}

TEST_CASE("contaminate_superimpose: missing donor class raises DataError") {
    PrngStream gen(29);
    const auto base = make_synthetic_image_set(20, 4, 4, 4, gen);
    auto donor = make_synthetic_image_set(20, 4, 4, 4, gen);
    for (auto& y : donor.labels) {
        if (y == 2) y = 1;  // remove class 2 from the donor pool
    }
    ContaminationSpec spec;
    spec.kind = ContaminationSpec::Kind::superimpose;
    PrngStream stream(11);
    CHECK_THROWS_AS(contaminate_superimpose(base, donor, spec, stream), DataError);
}

TEST_CASE("train_test_interface: provider split, stratified subsample, disjointness") {
    PrngStream gen(31);
    const auto set = make_synthetic_image_set(100, 4, 4, 5, gen);
    ContaminationSpec spec;
    PrngStream noise(1);
    const Tensor features = contaminate_awgn(set, spec, noise);

    const auto provider = provider_split(100, 80);
    auto [train80, test20] = train_test_interface(features, set.labels, 5, provider);
    CHECK(train80.size() == 80);
    CHECK(test20.size() == 20);

    PrngStream split_stream(13);
    const auto sub = stratified_subsample(set.labels, 5, 50, 25, split_stream);
    auto [train, test] = train_test_interface(features, set.labels, 5, sub);
    CHECK(train.size() == 50);
    CHECK(test.size() == 25);
    CHECK(train.class_counts() == std::vector<std::size_t>(5, 10));
    CHECK(test.class_counts() == std::vector<std::size_t>(5, 5));

    std::set<std::size_t> train_set(sub.train_indices.begin(), sub.train_indices.end());
    for (std::size_t i : sub.test_indices) CHECK(train_set.count(i) == 0);

    SplitSpec overlapping;
    overlapping.train_indices = {0, 1, 2};
    overlapping.test_indices = {2, 3};
    CHECK_THROWS_AS(train_test_interface(features, set.labels, 5, overlapping),
                    DataError);
}
