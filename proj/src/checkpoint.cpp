#include "proboost/checkpoint.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "proboost/errors.hpp"

namespace proboost {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json tensor_to_json(const Tensor& t) {
    return json{{"shape", t.shape()}, {"data", t.values()}};
}

Tensor tensor_from_json(const json& j) {
    return Tensor(j.at("shape").get<std::vector<std::size_t>>(),
                  j.at("data").get<std::vector<double>>());
}

json spec_to_json(const LayerSpec& spec) {
    return json{{"kind", layer_kind_name(spec.kind)},
                {"out_channels", spec.out_channels},
                {"kernel_size", spec.kernel_size},
                {"stride", spec.stride},
                {"pool_size", spec.pool_size},
                {"units", spec.units},
                {"rate", spec.rate},
                {"prior_std", spec.prior_std}};
}

LayerSpec spec_from_json(const json& j) {
    LayerSpec spec;
    spec.kind = layer_kind_from_name(j.at("kind").get<std::string>());
    spec.out_channels = j.at("out_channels").get<std::size_t>();
    spec.kernel_size = j.at("kernel_size").get<std::size_t>();
    spec.stride = j.at("stride").get<std::size_t>();
    spec.pool_size = j.at("pool_size").get<std::size_t>();
    spec.units = j.at("units").get<std::size_t>();
    spec.rate = j.at("rate").get<double>();
    spec.prior_std = j.at("prior_std").get<double>();
    return spec;
}

json learner_to_json(const WeakLearner& learner) {
    json layers = json::array();
    for (const auto& layer : learner.layers()) {
        json item;
        item["spec"] = spec_to_json(layer->spec());
        json params = json::array();
        for (Tensor* p : const_cast<Layer&>(*layer).parameters()) {
            params.push_back(tensor_to_json(*p));
        }
        item["parameters"] = params;
        layers.push_back(std::move(item));
    }
    return json{{"format_version", kFormatVersion},
                {"mode", learner_mode_name(learner.mode())},
                {"input_shape", learner.input_shape()},
                {"n_classes", learner.n_classes()},
                {"layers", layers}};
}

WeakLearner learner_from_json(const json& j) {
    if (j.at("format_version").get<int>() != kFormatVersion) {
        throw FormatError("learner checkpoint: unsupported format version");
    }
    const LearnerMode mode = learner_mode_from_name(j.at("mode").get<std::string>());
    const auto input_shape = j.at("input_shape").get<std::vector<std::size_t>>();
    const auto n_classes = j.at("n_classes").get<std::size_t>();

    PrngStream throwaway(0);  // parameters are overwritten below
    std::vector<std::unique_ptr<Layer>> layers;
    std::vector<std::size_t> shape = input_shape;
    for (const json& item : j.at("layers")) {
        auto layer = make_layer(spec_from_json(item.at("spec")), shape, throwaway);
        const json& params = item.at("parameters");
        auto targets = layer->parameters();
        if (params.size() != targets.size()) {
            throw FormatError("learner checkpoint: parameter count mismatch");
        }
        for (std::size_t i = 0; i < targets.size(); ++i) {
            Tensor loaded = tensor_from_json(params[i]);
            if (!loaded.same_shape(*targets[i])) {
                throw FormatError("learner checkpoint: parameter shape mismatch");
            }
            *targets[i] = std::move(loaded);
        }
        shape = layer->output_shape(shape);
        layers.push_back(std::move(layer));
    }
    return WeakLearner(mode, input_shape, n_classes, std::move(layers));
}

void write_json_atomic(const json& j, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw FormatError("cannot open " + tmp + " for writing");
        out << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

json read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    json j;
    in >> j;
    return j;
}

}  // namespace

void save_learner(const WeakLearner& learner, const std::string& path) {
    write_json_atomic(learner_to_json(learner), path);
}

WeakLearner load_learner(const std::string& path) { return learner_from_json(read_json(path)); }

void save_boosted_model(const BoostedModel& model, const std::string& dir) {
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["format_version"] = kFormatVersion;
    manifest["variant"] = boost_variant_name(model.config.variant);
    manifest["levels"] = model.config.levels;
    manifest["tau"] = model.config.tau;
    manifest["seed"] = model.config.seed;
    manifest["mc_samples"] = model.config.uncertainty.mc_samples;
    manifest["level_sizes"] = model.level_sizes;
    json files = json::array();
    for (std::size_t v = 0; v < model.learners.size(); ++v) {
        const std::string name = "level_" + std::to_string(v + 1) + ".json";
        save_learner(model.learners[v], dir + "/" + name);
        files.push_back(name);
    }
    manifest["learner_files"] = files;
    write_json_atomic(manifest, dir + "/manifest.json");
}

BoostedModel load_boosted_model(const std::string& dir) {
    const json manifest = read_json(dir + "/manifest.json");
    if (manifest.at("format_version").get<int>() != kFormatVersion) {
        throw FormatError("boosted checkpoint: unsupported format version");
    }
    BoostedModel model;
    model.config.variant =
        boost_variant_from_name(manifest.at("variant").get<std::string>());
    model.config.levels = manifest.at("levels").get<std::size_t>();
    model.config.tau = manifest.at("tau").get<double>();
    model.config.seed = manifest.at("seed").get<std::uint64_t>();
    model.config.uncertainty.mc_samples = manifest.at("mc_samples").get<std::size_t>();
    model.level_sizes = manifest.at("level_sizes").get<std::vector<std::size_t>>();
    for (const auto& name : manifest.at("learner_files")) {
        model.learners.push_back(load_learner(dir + "/" + name.get<std::string>()));
    }
    return model;
}

}  // namespace proboost
