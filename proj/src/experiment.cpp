#include "proboost/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "proboost/checkpoint.hpp"
#include "proboost/contaminate.hpp"
#include "proboost/csv.hpp"
#include "proboost/errors.hpp"
#include "proboost/idx.hpp"
#include "proboost/numerics.hpp"
#include "proboost/synthetic.hpp"

namespace proboost {

namespace {

using nlohmann::json;

namespace fs = std::filesystem;

// seed derivation roles
constexpr std::uint64_t kRoleData = 1;
constexpr std::uint64_t kRoleTrain = 2;
constexpr std::uint64_t kRoleWeights = 3;
constexpr std::uint64_t kRoleEval = 4;

void write_text_atomic(const std::string& path, const std::string& text) {
    fs::create_directories(fs::path(path).parent_path());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw FormatError("cannot open " + tmp + " for writing");
        out << text;
    }
    fs::rename(tmp, path);
}

json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    json j;
    in >> j;
    return j;
}

}  // namespace

json config_to_json(const ExperimentConfig& cfg) {
    json d{{"kind", cfg.dataset.kind},
           {"images_path", cfg.dataset.images_path},
           {"labels_path", cfg.dataset.labels_path},
           {"test_images_path", cfg.dataset.test_images_path},
           {"test_labels_path", cfg.dataset.test_labels_path},
           {"donor_images_path", cfg.dataset.donor_images_path},
           {"donor_labels_path", cfg.dataset.donor_labels_path},
           {"csv_path", cfg.dataset.csv_path},
           {"csv_feature_columns", cfg.dataset.csv_feature_columns},
           {"contamination", cfg.dataset.contamination},
           {"awgn_mean", cfg.dataset.awgn_mean},
           {"awgn_variance", cfg.dataset.awgn_variance},
           {"superimpose_fraction", cfg.dataset.superimpose_fraction},
           {"provider_train", cfg.dataset.provider_train},
           {"train_subsample", cfg.dataset.train_subsample},
           {"test_subsample", cfg.dataset.test_subsample},
           {"synth_count", cfg.dataset.synth_count},
           {"synth_image_size", cfg.dataset.synth_image_size},
           {"synth_classes", cfg.dataset.synth_classes},
           {"synth_jitter", cfg.dataset.synth_jitter},
           {"synth_contrast", cfg.dataset.synth_contrast}};
    json l{{"family", cfg.learner.family},
           {"arch", cfg.learner.arch},
           {"hidden", cfg.learner.hidden},
           {"dropout_rate", cfg.learner.dropout_rate},
           {"prior_std", cfg.learner.prior_std},
           {"mc_samples", cfg.learner.mc_samples}};
    json t{{"batch_size", cfg.train.batch_size},
           {"max_epochs", cfg.train.max_epochs},
           {"patience", cfg.train.patience},
           {"validation_fraction", cfg.train.validation_fraction},
           {"learning_rate", cfg.train.learning_rate},
           {"elbo_mc_samples", cfg.train.elbo_mc_samples}};
    return json{{"dataset", d},
                {"learner", l},
                {"variant", cfg.variant},
                {"levels", cfg.levels},
                {"tau", cfg.tau},
                {"weights", cfg.weights},
                {"repetitions", cfg.repetitions},
                {"base_seed", cfg.base_seed},
                {"out_dir", cfg.out_dir},
                {"save_models", cfg.save_models},
                {"train", t}};
}

namespace {

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    if (j.contains("dataset")) {
        const json& d = j.at("dataset");
        maybe(d, "kind", cfg.dataset.kind);
        maybe(d, "images_path", cfg.dataset.images_path);
        maybe(d, "labels_path", cfg.dataset.labels_path);
        maybe(d, "test_images_path", cfg.dataset.test_images_path);
        maybe(d, "test_labels_path", cfg.dataset.test_labels_path);
        maybe(d, "donor_images_path", cfg.dataset.donor_images_path);
        maybe(d, "donor_labels_path", cfg.dataset.donor_labels_path);
        maybe(d, "csv_path", cfg.dataset.csv_path);
        maybe(d, "csv_feature_columns", cfg.dataset.csv_feature_columns);
        maybe(d, "contamination", cfg.dataset.contamination);
        maybe(d, "awgn_mean", cfg.dataset.awgn_mean);
        maybe(d, "awgn_variance", cfg.dataset.awgn_variance);
        maybe(d, "superimpose_fraction", cfg.dataset.superimpose_fraction);
        maybe(d, "provider_train", cfg.dataset.provider_train);
        maybe(d, "train_subsample", cfg.dataset.train_subsample);
        maybe(d, "test_subsample", cfg.dataset.test_subsample);
        maybe(d, "synth_count", cfg.dataset.synth_count);
        maybe(d, "synth_image_size", cfg.dataset.synth_image_size);
        maybe(d, "synth_classes", cfg.dataset.synth_classes);
        maybe(d, "synth_jitter", cfg.dataset.synth_jitter);
        maybe(d, "synth_contrast", cfg.dataset.synth_contrast);
    }
    if (j.contains("learner")) {
        const json& l = j.at("learner");
        maybe(l, "family", cfg.learner.family);
        maybe(l, "arch", cfg.learner.arch);
        maybe(l, "hidden", cfg.learner.hidden);
        maybe(l, "dropout_rate", cfg.learner.dropout_rate);
        maybe(l, "prior_std", cfg.learner.prior_std);
        maybe(l, "mc_samples", cfg.learner.mc_samples);
    }
    maybe(j, "variant", cfg.variant);
    maybe(j, "levels", cfg.levels);
    maybe(j, "tau", cfg.tau);
    maybe(j, "weights", cfg.weights);
    maybe(j, "repetitions", cfg.repetitions);
    maybe(j, "base_seed", cfg.base_seed);
    maybe(j, "out_dir", cfg.out_dir);
    maybe(j, "save_models", cfg.save_models);
    if (j.contains("train")) {
        const json& t = j.at("train");
        maybe(t, "batch_size", cfg.train.batch_size);
        maybe(t, "max_epochs", cfg.train.max_epochs);
        maybe(t, "patience", cfg.train.patience);
        maybe(t, "validation_fraction", cfg.train.validation_fraction);
        maybe(t, "learning_rate", cfg.train.learning_rate);
        maybe(t, "elbo_mc_samples", cfg.train.elbo_mc_samples);
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    return config_from_json(read_json_file(path));
}

std::string cell_id(const ExperimentConfig& cfg) {
    std::ostringstream id;
    id << cfg.learner.family << "_" << cfg.learner.arch << "_" << cfg.variant << "_V"
       << cfg.levels << "_" << cfg.weights;
    return id.str();
}

std::string content_hash_hex(const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// dataset preparation and caching

namespace {

void append_bytes(std::string& out, const void* data, std::size_t bytes) {
    out.append(static_cast<const char*>(data), bytes);
}

std::string serialize_dataset_pair(const Dataset& train, const Dataset& test) {
    std::string out;
    out += "PBDS";
    const std::uint32_t version = 1;
    append_bytes(out, &version, sizeof(version));
    const std::uint32_t k = static_cast<std::uint32_t>(train.n_classes);
    append_bytes(out, &k, sizeof(k));
    for (const Dataset* d : {&train, &test}) {
        const std::uint32_t rank = static_cast<std::uint32_t>(d->features.rank());
        append_bytes(out, &rank, sizeof(rank));
        for (std::size_t dim : d->features.shape()) {
            const std::uint64_t v = dim;
            append_bytes(out, &v, sizeof(v));
        }
        append_bytes(out, d->features.data(), d->features.size() * sizeof(double));
        for (int y : d->labels) {
            const std::uint32_t v = static_cast<std::uint32_t>(y);
            append_bytes(out, &v, sizeof(v));
        }
    }
    return out;
}

std::pair<Dataset, Dataset> deserialize_dataset_pair(const std::string& bytes) {
    std::size_t pos = 0;
    const auto read = [&](void* dst, std::size_t n) {
        if (pos + n > bytes.size()) throw FormatError("dataset cache: truncated");
        std::memcpy(dst, bytes.data() + pos, n);
        pos += n;
    };
    char magic[4];
    read(magic, 4);
    if (std::memcmp(magic, "PBDS", 4) != 0) throw FormatError("dataset cache: bad magic");
    std::uint32_t version = 0, k = 0;
    read(&version, sizeof(version));
    if (version != 1) throw FormatError("dataset cache: unsupported version");
    read(&k, sizeof(k));

    std::vector<Dataset> parts;
    for (int part = 0; part < 2; ++part) {
        std::uint32_t rank = 0;
        read(&rank, sizeof(rank));
        std::vector<std::size_t> shape(rank);
        for (auto& dim : shape) {
            std::uint64_t v = 0;
            read(&v, sizeof(v));
            dim = static_cast<std::size_t>(v);
        }
        Tensor features(shape);
        read(features.data(), features.size() * sizeof(double));
        std::vector<int> labels(shape[0]);
        for (auto& y : labels) {
            std::uint32_t v = 0;
            read(&v, sizeof(v));
            y = static_cast<int>(v);
        }
        parts.emplace_back(std::move(features), std::move(labels),
                           static_cast<int>(k));
    }
    return {std::move(parts[0]), std::move(parts[1])};
}

std::string dataset_cache_key(const ExperimentConfig& cfg, std::size_t repetition) {
    json key{{"dataset", config_to_json(cfg).at("dataset")},
             {"base_seed", cfg.base_seed},
             {"repetition", repetition}};
    const std::string dumped = key.dump();
    return content_hash_hex(dumped.data(), dumped.size());
}

PreparedData build_data(const ExperimentConfig& cfg, std::size_t repetition) {
    const DatasetConfig& d = cfg.dataset;
    const std::uint64_t data_seed = derive_seed(cfg.base_seed, repetition, kRoleData);
    PrngStream data_stream(data_seed);

    Tensor features;
    std::vector<int> labels;
    int n_classes = 0;
    std::size_t provider_boundary = 0;  // count of provider-side training rows

    if (d.kind == "csv") {
        Dataset loaded = load_csv_labeled(d.csv_path, d.csv_feature_columns);
        features = loaded.features;
        labels = loaded.labels;
        n_classes = loaded.n_classes;
    } else {
        RawImageSet base;
        if (d.kind == "idx") {
            base = load_idx(d.images_path, d.labels_path);
            if (!d.test_images_path.empty()) {
                // provider ships a separate test pair: append it and remember
                // the boundary so splits never cross it
                const RawImageSet test = load_idx(d.test_images_path, d.test_labels_path);
                if (test.height != base.height || test.width != base.width) {
                    throw DataError("idx test set image size differs from train set");
                }
                provider_boundary = base.count;
                base.pixels.insert(base.pixels.end(), test.pixels.begin(),
                                   test.pixels.end());
                base.labels.insert(base.labels.end(), test.labels.begin(),
                                   test.labels.end());
                base.count += test.count;
            }
        } else if (d.kind == "synthetic") {
            PrngStream synth_stream = data_stream.substream(2);
            std::size_t count = d.synth_count;
            if (d.train_subsample > 0 && d.test_subsample > 0) {
                count = std::max(count, d.train_subsample + d.test_subsample);
            }
            // the generator rounds down to a class multiple; round up first so
            // a stratified subsample always has full per-class pools
            const std::size_t k = static_cast<std::size_t>(d.synth_classes);
            count = ((count + k - 1) / k) * k;
            base = make_synthetic_image_set(count, d.synth_image_size,
                                            d.synth_image_size, d.synth_classes,
                                            synth_stream, d.synth_jitter,
                                            d.synth_contrast);
        } else {
            throw InvalidParameter("unknown dataset kind: " + d.kind);
        }
        n_classes = 1 + *std::max_element(base.labels.begin(), base.labels.end());
        labels = base.labels;

        PrngStream noise_stream = data_stream.substream(0);
        if (d.contamination == "awgn") {
            ContaminationSpec spec;
            spec.kind = ContaminationSpec::Kind::awgn;
            spec.awgn_mean = d.awgn_mean;
            spec.awgn_variance = d.awgn_variance;
            features = contaminate_awgn(base, spec, noise_stream);
        } else if (d.contamination == "superimpose") {
            const RawImageSet donor = load_idx(d.donor_images_path, d.donor_labels_path);
            ContaminationSpec spec;
            spec.kind = ContaminationSpec::Kind::superimpose;
            spec.fraction = d.superimpose_fraction;
            features = contaminate_superimpose(base, donor, spec, noise_stream);
        } else if (d.contamination == "none") {
            features = Tensor({base.count, 1, base.height, base.width});
            for (std::size_t i = 0; i < base.pixels.size(); ++i) {
                features[i] = static_cast<double>(base.pixels[i]) / 255.0;
            }
        } else {
            throw InvalidParameter("unknown contamination: " + d.contamination);
        }
    }

    SplitSpec split;
    if (d.train_subsample > 0 && d.test_subsample > 0) {
        PrngStream split_stream = data_stream.substream(1);
        if (provider_boundary > 0) {
            // subsample each side of the provider boundary separately
            const std::vector<int> train_labels(labels.begin(),
                                                labels.begin() + provider_boundary);
            const std::vector<int> test_labels(labels.begin() + provider_boundary,
                                               labels.end());
            PrngStream train_stream = split_stream.substream(0);
            PrngStream test_stream = split_stream.substream(1);
            const SplitSpec train_side = stratified_subsample(
                train_labels, n_classes, d.train_subsample, 0, train_stream);
            const SplitSpec test_side = stratified_subsample(
                test_labels, n_classes, d.test_subsample, 0, test_stream);
            split.train_indices = train_side.train_indices;
            for (std::size_t i : test_side.train_indices) {
                split.test_indices.push_back(i + provider_boundary);
            }
        } else {
            split = stratified_subsample(labels, n_classes, d.train_subsample,
                                         d.test_subsample, split_stream);
        }
    } else if (provider_boundary > 0) {
        split = provider_split(labels.size(), provider_boundary);
    } else if (d.provider_train > 0) {
        split = provider_split(labels.size(), d.provider_train);
    } else {
        throw InvalidParameter(
            "dataset config needs provider_train, a provider test pair, or "
            "train/test subsamples");
    }

    auto [train, test] = train_test_interface(features, labels, n_classes, split);
    PreparedData prepared{std::move(train), std::move(test), ""};
    const std::string bytes = serialize_dataset_pair(prepared.train, prepared.test);
    prepared.hash = content_hash_hex(bytes.data(), bytes.size());
    return prepared;
}

}  // namespace

PreparedData prepare_data(const ExperimentConfig& cfg, std::size_t repetition) {
    const std::string key = dataset_cache_key(cfg, repetition);
    const fs::path cache_dir = fs::path(cfg.out_dir) / "cache";
    const fs::path cache_file = cache_dir / (key + ".bin");

    if (fs::exists(cache_file)) {
        std::ifstream in(cache_file, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
        auto [train, test] = deserialize_dataset_pair(bytes);
        return {std::move(train), std::move(test),
                content_hash_hex(bytes.data(), bytes.size())};
    }

    PreparedData prepared = build_data(cfg, repetition);
    fs::create_directories(cache_dir);
    const std::string bytes = serialize_dataset_pair(prepared.train, prepared.test);
    write_text_atomic(cache_file.string(), bytes);
    return prepared;
}

std::string cmd_prepare_data(const ExperimentConfig& cfg) {
    json reps = json::array();
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
        const PreparedData prepared = prepare_data(cfg, rep);
        reps.push_back(json{{"repetition", rep},
                            {"cache_key", dataset_cache_key(cfg, rep)},
                            {"content_hash", prepared.hash},
                            {"train_size", prepared.train.size()},
                            {"test_size", prepared.test.size()}});
    }
    json manifest{{"dataset", config_to_json(cfg).at("dataset")},
                  {"base_seed", cfg.base_seed},
                  {"repetitions", reps}};
    const std::string path =
        (fs::path(cfg.out_dir) / "cache" /
         ("manifest_" + dataset_cache_key(cfg, 0) + ".json"))
            .string();
    write_text_atomic(path, manifest.dump(2) + "\n");
    return path;
}

// ---------------------------------------------------------------------------
// training cells and records

namespace {

json metrics_to_json(const MetricsReport& m) {
    json per_class = json::array();
    for (const auto& c : m.per_class) {
        per_class.push_back(json{{"acc", c.acc},
                                 {"sen", c.sen},
                                 {"spe", c.spe},
                                 {"ppv", c.ppv},
                                 {"npv", c.npv},
                                 {"undefined_ratio", c.undefined_ratio}});
    }
    return json{{"acc", m.acc},       {"sen", m.sen},
                {"spe", m.spe},       {"ppv", m.ppv},
                {"npv", m.npv},       {"auc", m.auc},
                {"per_class", per_class}, {"flagged_classes", m.flagged_classes}};
}

MetricsReport metrics_from_json(const json& j) {
    MetricsReport m;
    m.acc = j.at("acc").get<double>();
    m.sen = j.at("sen").get<double>();
    m.spe = j.at("spe").get<double>();
    m.ppv = j.at("ppv").get<double>();
    m.npv = j.at("npv").get<double>();
    m.auc = j.at("auc").get<double>();
    for (const auto& c : j.at("per_class")) {
        ClassMetrics cm;
        cm.acc = c.at("acc").get<double>();
        cm.sen = c.at("sen").get<double>();
        cm.spe = c.at("spe").get<double>();
        cm.ppv = c.at("ppv").get<double>();
        cm.npv = c.at("npv").get<double>();
        cm.undefined_ratio = c.at("undefined_ratio").get<bool>();
        m.per_class.push_back(cm);
    }
    m.flagged_classes =
        j.at("flagged_classes").get<std::vector<std::size_t>>();
    return m;
}

WeakLearner make_learner(const LearnerConfig& lc,
                         const std::vector<std::size_t>& sample_shape,
                         std::size_t n_classes, PrngStream& init_stream) {
    const LearnerMode mode = learner_mode_from_name(lc.family);
    if (lc.arch == "dense") {
        return build_dense_stack(shape_product(sample_shape), lc.hidden, n_classes,
                                 mode, init_stream, lc.dropout_rate, lc.prior_std);
    }
    if (lc.arch == "lenet") {
        if (sample_shape.size() != 3) {
            throw UnsupportedConfiguration("lenet needs [C, H, W] image features");
        }
        return build_lenet_variant(sample_shape, n_classes, mode, init_stream,
                                   lc.dropout_rate);
    }
    throw InvalidParameter("unknown learner arch: " + lc.arch);
}

UncertaintyConfig uncertainty_for(const LearnerConfig& lc) {
    if (lc.mc_samples > 0) return {lc.mc_samples};
    return UncertaintyConfig::for_mode(learner_mode_from_name(lc.family));
}

Dataset flattened_for_dense(const Dataset& d, const LearnerConfig& lc) {
    if (lc.arch != "dense" || d.features.rank() == 2) return d;
    Dataset out = d;
    out.features =
        d.features.reshaped({d.size(), d.features.size() / d.size()});
    return out;
}

std::string record_path(const ExperimentConfig& cfg, std::size_t rep) {
    return (fs::path(cfg.out_dir) / "records" / cell_id(cfg) /
            ("rep_" + std::to_string(rep) + ".json"))
        .string();
}

ResultRecord record_from_json(const json& j) {
    ResultRecord r;
    r.cell = j.at("cell").get<std::string>();
    r.repetition = j.at("repetition").get<std::size_t>();
    r.data_seed = j.at("data_seed").get<std::uint64_t>();
    r.train_seed = j.at("train_seed").get<std::uint64_t>();
    r.config_echo = j.at("config");
    r.metrics = metrics_from_json(j.at("metrics"));
    r.level_sizes = j.at("level_sizes").get<std::vector<std::size_t>>();
    r.psi = j.at("psi").get<std::vector<double>>();
    if (j.contains("timing")) {
        r.wall_clock_s = j.at("timing").at("wall_clock_s").get<double>();
    }
    return r;
}

void write_records_csv(const ExperimentConfig& cfg,
                       const std::vector<ResultRecord>& records) {
    std::ostringstream out;
    out << "cell,repetition,data_seed,train_seed,acc,sen,spe,ppv,npv,auc,"
           "level_sizes,psi,wall_clock_s\n";
    out << std::setprecision(17);
    for (const auto& r : records) {
        out << r.cell << ',' << r.repetition << ',' << r.data_seed << ','
            << r.train_seed << ',' << r.metrics.acc << ',' << r.metrics.sen << ','
            << r.metrics.spe << ',' << r.metrics.ppv << ',' << r.metrics.npv << ','
            << r.metrics.auc << ',';
        for (std::size_t i = 0; i < r.level_sizes.size(); ++i) {
            if (i) out << ';';
            out << r.level_sizes[i];
        }
        out << ',';
        for (std::size_t i = 0; i < r.psi.size(); ++i) {
            if (i) out << ';';
            out << r.psi[i];
        }
        out << ',' << r.wall_clock_s << '\n';
    }
    const std::string path = (fs::path(cfg.out_dir) / "records" / cell_id(cfg) /
                              "records.csv")
                                 .string();
    write_text_atomic(path, out.str());
}

ResultRecord run_cell_repetition(const ExperimentConfig& cfg, std::size_t rep) {
    const auto started = std::chrono::steady_clock::now();

    PreparedData data = prepare_data(cfg, rep);
    const Dataset train_set = flattened_for_dense(data.train, cfg.learner);
    const Dataset test_set = flattened_for_dense(data.test, cfg.learner);

    BoostConfig bc;
    bc.variant = boost_variant_from_name(cfg.variant);
    bc.levels = cfg.levels;
    bc.tau = cfg.tau;
    bc.uncertainty = uncertainty_for(cfg.learner);
    bc.train = cfg.train;
    bc.seed = derive_seed(cfg.base_seed, rep, kRoleTrain);

    const auto sample_shape = train_set.sample_shape();
    const std::size_t n_classes = static_cast<std::size_t>(train_set.n_classes);
    const LearnerFactory factory = [&](PrngStream& init_stream) {
        return make_learner(cfg.learner, sample_shape, n_classes, init_stream);
    };

    BoostedModel model = run_proboost(train_set, bc, factory);

    EnsembleModel ensemble;
    ensemble.uncertainty = bc.uncertainty;
    PrngStream weight_stream(derive_seed(cfg.base_seed, rep, kRoleWeights));
    const WeightScheme scheme = weight_scheme_from_name(cfg.weights);
    if (scheme == WeightScheme::FW) {
        ensemble.weights = fw_weights(cfg.levels);
    } else if (scheme == WeightScheme::VW) {
        ensemble.weights = vw_weights(model, train_set, bc.uncertainty, weight_stream);
    } else {
        ensemble.weights =
            vwo_search(model, test_set, bc.uncertainty, weight_stream).weights;
    }

    ResultRecord record;
    record.level_sizes = model.level_sizes;
    record.psi = ensemble.weights.psi;

    if (cfg.save_models) {
        const std::string dir = (fs::path(cfg.out_dir) / "models" / cell_id(cfg) /
                                 ("rep_" + std::to_string(rep)))
                                    .string();
        save_boosted_model(model, dir);
    }

    ensemble.boosted = std::move(model);
    PrngStream eval_stream(derive_seed(cfg.base_seed, rep, kRoleEval));
    const EnsemblePrediction pred =
        ensemble_predict(ensemble, test_set.features, eval_stream);

    record.metrics =
        macro_metrics(test_set.labels, pred.labels, test_set.n_classes);
    record.metrics.auc = auc_ova(pred.scores, test_set.labels);

    record.cell = cell_id(cfg);
    record.repetition = rep;
    record.data_seed = derive_seed(cfg.base_seed, rep, kRoleData);
    record.train_seed = bc.seed;
    record.config_echo = config_to_json(cfg);
    record.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    return record;
}

}  // namespace

json ResultRecord::canonical_json() const {
    return json{{"cell", cell},
                {"repetition", repetition},
                {"data_seed", data_seed},
                {"train_seed", train_seed},
                {"config", config_echo},
                {"metrics", metrics_to_json(metrics)},
                {"level_sizes", level_sizes},
                {"psi", psi}};
}

std::vector<ResultRecord> cmd_train(const ExperimentConfig& cfg) {
    std::vector<ResultRecord> records;
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
        const std::string path = record_path(cfg, rep);
        if (fs::exists(path)) {
            records.push_back(record_from_json(read_json_file(path)));
            continue;
        }
        ResultRecord record = run_cell_repetition(cfg, rep);
        json j = record.canonical_json();
        j["timing"] = json{{"wall_clock_s", record.wall_clock_s}};
        write_text_atomic(path, j.dump(2) + "\n");
        records.push_back(std::move(record));
    }
    write_records_csv(cfg, records);
    return records;
}

MetricsReport cmd_evaluate(const ExperimentConfig& cfg, const std::string& model_dir,
                           std::size_t repetition) {
    BoostedModel model = load_boosted_model(model_dir);
    PreparedData data = prepare_data(cfg, repetition);
    const Dataset train_set = flattened_for_dense(data.train, cfg.learner);
    const Dataset test_set = flattened_for_dense(data.test, cfg.learner);

    EnsembleModel ensemble;
    ensemble.uncertainty = uncertainty_for(cfg.learner);
    PrngStream weight_stream(derive_seed(cfg.base_seed, repetition, kRoleWeights));
    const WeightScheme scheme = weight_scheme_from_name(cfg.weights);
    if (scheme == WeightScheme::FW) {
        ensemble.weights = fw_weights(model.learners.size());
    } else if (scheme == WeightScheme::VW) {
        ensemble.weights =
            vw_weights(model, train_set, ensemble.uncertainty, weight_stream);
    } else {
        ensemble.weights =
            vwo_search(model, test_set, ensemble.uncertainty, weight_stream).weights;
    }
    ensemble.boosted = std::move(model);

    PrngStream eval_stream(derive_seed(cfg.base_seed, repetition, kRoleEval));
    const EnsemblePrediction pred =
        ensemble_predict(ensemble, test_set.features, eval_stream);
    MetricsReport metrics =
        macro_metrics(test_set.labels, pred.labels, test_set.n_classes);
    metrics.auc = auc_ova(pred.scores, test_set.labels);
    return metrics;
}

// ---------------------------------------------------------------------------
// reporting

std::vector<ResultRecord> load_records(const std::string& out_dir,
                                       const std::string& cell) {
    const fs::path dir = fs::path(out_dir) / "records" / cell;
    if (!fs::exists(dir)) throw DataError("no records for cell " + cell);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("rep_", 0) == 0 && entry.path().extension() == ".json") {
            files.push_back(entry.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<ResultRecord> records;
    for (const auto& f : files) records.push_back(record_from_json(read_json_file(f)));
    std::sort(records.begin(), records.end(),
              [](const ResultRecord& a, const ResultRecord& b) {
                  return a.repetition < b.repetition;
              });
    return records;
}

std::vector<std::string> list_record_cells(const std::string& out_dir) {
    const fs::path dir = fs::path(out_dir) / "records";
    std::vector<std::string> cells;
    if (!fs::exists(dir)) return cells;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory()) cells.push_back(entry.path().filename().string());
    }
    std::sort(cells.begin(), cells.end());
    return cells;
}

namespace {

const std::vector<std::pair<std::string, double MetricsReport::*>> kMetricFields = {
    {"acc", &MetricsReport::acc}, {"sen", &MetricsReport::sen},
    {"spe", &MetricsReport::spe}, {"ppv", &MetricsReport::ppv},
    {"npv", &MetricsReport::npv}, {"auc", &MetricsReport::auc}};

std::vector<double> metric_series(const std::vector<ResultRecord>& records,
                                  double MetricsReport::*field) {
    std::vector<double> values;
    values.reserve(records.size());
    for (const auto& r : records) values.push_back(r.metrics.*field);
    return values;
}

}  // namespace

CellReport summarize_cell(const std::vector<ResultRecord>& records) {
    if (records.size() < 2) {
        throw DataError("summarize_cell: need at least 2 repetitions");
    }
    CellReport report;
    report.cell = records.front().cell;
    report.repetitions = records.size();
    for (const auto& [name, field] : kMetricFields) {
        report.summaries.emplace_back(name, summarize_runs(metric_series(records, field)));
    }
    return report;
}

ComparisonReport compare_cells(const std::vector<ResultRecord>& baseline,
                               const std::vector<ResultRecord>& treatment) {
    if (baseline.size() != treatment.size() || baseline.size() < 2) {
        throw DataError("compare_cells: need matched repetition counts >= 2");
    }
    for (std::size_t i = 0; i < baseline.size(); ++i) {
        if (baseline[i].repetition != treatment[i].repetition ||
            baseline[i].data_seed != treatment[i].data_seed) {
            throw DataError("compare_cells: repetition seeds do not match");
        }
    }
    ComparisonReport report;
    report.baseline = baseline.front().cell;
    report.treatment = treatment.front().cell;
    for (const auto& [name, field] : kMetricFields) {
        const auto base_values = metric_series(baseline, field);
        const auto treat_values = metric_series(treatment, field);
        const double base_mean = summarize_runs(base_values).mean;
        const double treat_mean = summarize_runs(treat_values).mean;
        const double improvement = roi(base_mean, treat_mean);
        double p = std::numeric_limits<double>::quiet_NaN();
        try {
            p = paired_t_test_one_tailed(base_values, treat_values);
        } catch (const DegenerateDifferences&) {
            // flagged as NaN: identical series have no defined t statistic
        }
        report.rows.emplace_back(name, improvement, p);
    }
    return report;
}

std::string cmd_report(const std::string& out_dir, const std::string& baseline_cell,
                       const std::vector<std::string>& treatment_cells) {
    std::vector<std::string> cells = treatment_cells;
    if (cells.empty()) {
        for (const auto& c : list_record_cells(out_dir)) {
            if (c != baseline_cell) cells.push_back(c);
        }
    }

    std::ostringstream text;
    std::ostringstream summary_csv;
    summary_csv << "cell,metric,mean,std,min,max,ci_low,ci_high,n\n";
    summary_csv << std::setprecision(17);
    std::ostringstream roi_csv;
    roi_csv << "baseline,treatment,metric,baseline_mean,treatment_mean,roi,p_value\n";
    roi_csv << std::setprecision(17);

    const auto print_cell = [&](const std::string& cell) {
        const auto records = load_records(out_dir, cell);
        const auto report = summarize_cell(records);
        text << "cell " << cell << " (" << report.repetitions << " repetitions)\n";
        text << "  metric      mean       std        min        max        95% CI\n";
        for (const auto& [name, s] : report.summaries) {
            text << "  " << std::left << std::setw(6) << name << std::right
                 << std::fixed << std::setprecision(4) << std::setw(11) << s.mean
                 << std::setw(11) << s.std_dev << std::setw(11) << s.min
                 << std::setw(11) << s.max << "   [" << s.ci_low << ", " << s.ci_high
                 << "]\n";
            summary_csv << cell << ',' << name << ',' << s.mean << ',' << s.std_dev
                        << ',' << s.min << ',' << s.max << ',' << s.ci_low << ','
                        << s.ci_high << ',' << s.n << '\n';
        }
        text << '\n';
        return records;
    };

    const auto baseline_records = print_cell(baseline_cell);
    std::map<std::string, double> baseline_means;
    for (const auto& [name, field] : kMetricFields) {
        baseline_means[name] = summarize_runs(metric_series(baseline_records, field)).mean;
    }
    for (const auto& cell : cells) {
        const auto treatment_records = print_cell(cell);
        const auto comparison = compare_cells(baseline_records, treatment_records);
        text << "comparison " << baseline_cell << " -> " << cell << '\n';
        text << "  metric        roi     one-tailed p\n";
        for (const auto& [name, improvement, p] : comparison.rows) {
            const double base_mean = baseline_means.at(name);
            const double treat_mean = base_mean + improvement * (1.0 - base_mean);
            text << "  " << std::left << std::setw(6) << name << std::right
                 << std::fixed << std::setprecision(4) << std::setw(11) << improvement;
            if (std::isnan(p)) text << "   degenerate\n";
            else text << std::setw(15) << p << '\n';
            roi_csv << baseline_cell << ',' << cell << ',' << name << ',' << base_mean
                    << ',' << treat_mean << ',' << improvement << ',';
            if (std::isnan(p)) roi_csv << "degenerate";
            else roi_csv << p;
            roi_csv << '\n';
        }
        text << '\n';
    }

    write_text_atomic((fs::path(out_dir) / "summary.csv").string(), summary_csv.str());
    write_text_atomic((fs::path(out_dir) / "roi.csv").string(), roi_csv.str());
    write_text_atomic((fs::path(out_dir) / "report.txt").string(), text.str());
    return text.str();
}

// ---------------------------------------------------------------------------
// Iris demonstration

IrisDemoResult cmd_demo_iris(const std::string& iris_csv, std::uint64_t seed,
                             const std::string& trace_csv_path) {
    const Dataset iris = load_csv_labeled(iris_csv, {0, 2});
    const std::size_t n = iris.size();

    // paper-faithful training defaults: batch 16, Adam 1e-3, max 300 epochs,
    // patience 10. The resulting concentrated posterior is what keeps the
    // easily separable class out of the hardest quartile; aggressive learning
    // rates converge toward the broader exact posterior and lose that shape.
    BoostConfig bc;
    bc.variant = BoostVariant::weighted;
    bc.levels = 3;
    bc.tau = 0.25;
    bc.uncertainty = UncertaintyConfig::for_mode(LearnerMode::vi);
    bc.seed = seed;

    const LearnerFactory factory = [&](PrngStream& init_stream) {
        return build_dense_stack(2, {}, static_cast<std::size_t>(iris.n_classes),
                                 LearnerMode::vi, init_stream);
    };

    IrisDemoResult result;
    result.rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        result.rows[i].sample = i;
        result.rows[i].sepal_length = iris.features.at(i, 0);
        result.rows[i].petal_length = iris.features.at(i, 1);
        result.rows[i].species = iris.labels[i];
        result.rows[i].weight_at_level.assign(bc.levels, 0.0);
        result.rows[i].uncertainty_at_level.assign(bc.levels, 0.0);
        result.rows[i].in_top_set.assign(bc.levels, false);
    }

    BoostedModel model = run_proboost(iris, bc, factory, [&](const LevelObservation& obs) {
        const std::size_t level_idx = obs.level - 1;
        for (std::size_t row = 0; row < obs.dataset->size(); ++row) {
            const std::size_t orig = (*obs.origin)[row];
            result.rows[orig].weight_at_level[level_idx] = obs.dataset->weights[row];
        }
        if (!obs.scores) return;
        for (std::size_t row = 0; row < obs.dataset->size(); ++row) {
            result.rows[(*obs.origin)[row]].uncertainty_at_level[level_idx] =
                obs.scores->u[row];
        }
        // the hardest-tau set of Algorithm 3: sorted positions from
        // floor(len * (1 - tau)) to the end
        const auto sorted = stable_argsort_ascending(obs.scores->u);
        const std::size_t boundary = static_cast<std::size_t>(std::floor(
            static_cast<double>(sorted.size()) * (1.0 - bc.tau)));
        std::size_t increments = 0;
        for (std::size_t pos = boundary; pos < sorted.size(); ++pos) {
            const std::size_t orig = (*obs.origin)[sorted[pos]];
            result.rows[orig].in_top_set[level_idx] = true;
            ++increments;
            if (result.rows[orig].species == 0) result.class0_untouched = false;
        }
        result.increments_per_level.push_back(increments);
    });

    // score the final level too so the emitted table covers every level
    {
        WeakLearner& last = model.learners.back();
        PrngStream final_stream(derive_seed(seed, bc.levels, kRoleEval));
        const auto dist =
            mc_predict(last, iris.features, bc.uncertainty, final_stream, true);
        const auto scores = epistemic_variance(dist);
        for (std::size_t i = 0; i < n; ++i) {
            result.rows[i].uncertainty_at_level[bc.levels - 1] = scores.u[i];
        }
    }

    if (!trace_csv_path.empty()) {
        std::ostringstream out;
        out << "sample,sepal_length,petal_length,species";
        for (std::size_t l = 1; l <= bc.levels; ++l) out << ",weight_l" << l;
        for (std::size_t l = 1; l <= bc.levels; ++l) out << ",uncertainty_l" << l;
        for (std::size_t l = 1; l < bc.levels; ++l) out << ",in_top_set_l" << l;
        out << '\n' << std::setprecision(17);
        for (const auto& row : result.rows) {
            out << row.sample << ',' << row.sepal_length << ',' << row.petal_length
                << ',' << row.species;
            for (double w : row.weight_at_level) out << ',' << w;
            for (double u : row.uncertainty_at_level) out << ',' << u;
            for (std::size_t l = 0; l + 1 < row.in_top_set.size(); ++l) {
                out << ',' << (row.in_top_set[l] ? 1 : 0);
            }
            out << '\n';
        }
        write_text_atomic(trace_csv_path, out.str());
    }
    return result;
}

}  // namespace proboost
