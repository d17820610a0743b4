#include "radioclass/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "radioclass/cnn.hpp"
#include "radioclass/errors.hpp"

namespace radioclass {

namespace {

constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

std::string base64_encode(const uint8_t* data, size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (size_t i = 0; i < len; i += 3) {
    uint32_t chunk = static_cast<uint32_t>(data[i]) << 16;
    if (i + 1 < len) chunk |= static_cast<uint32_t>(data[i + 1]) << 8;
    if (i + 2 < len) chunk |= static_cast<uint32_t>(data[i + 2]);
    out.push_back(kB64Alphabet[(chunk >> 18) & 0x3f]);
    out.push_back(kB64Alphabet[(chunk >> 12) & 0x3f]);
    out.push_back(i + 1 < len ? kB64Alphabet[(chunk >> 6) & 0x3f] : '=');
    out.push_back(i + 2 < len ? kB64Alphabet[chunk & 0x3f] : '=');
  }
  return out;
}

std::vector<uint8_t> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0)
    throw IoError("base64 length not a multiple of 4");
  int8_t lookup[256];
  std::memset(lookup, -1, sizeof(lookup));
  for (int i = 0; i < 64; ++i)
    lookup[static_cast<uint8_t>(kB64Alphabet[i])] = static_cast<int8_t>(i);

  std::vector<uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (size_t i = 0; i < text.size(); i += 4) {
    uint32_t chunk = 0;
    int pad = 0;
    for (int j = 0; j < 4; ++j) {
      const char c = text[i + j];
      if (c == '=') {
        if (i + 4 != text.size() || j < 2)
          throw IoError("base64 padding misplaced");
        ++pad;
        chunk <<= 6;
        continue;
      }
      if (pad > 0 || lookup[static_cast<uint8_t>(c)] < 0)
        throw IoError("base64 bad character");
      chunk = (chunk << 6) | static_cast<uint32_t>(
                                 lookup[static_cast<uint8_t>(c)]);
    }
    out.push_back(static_cast<uint8_t>((chunk >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<uint8_t>((chunk >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<uint8_t>(chunk & 0xff));
  }
  return out;
}

namespace {

using nlohmann::json;

json tensor_json(const std::vector<double>& data,
                 std::vector<size_t> shape) {
  std::vector<uint8_t> bytes(data.size() * 8);
  for (size_t i = 0; i < data.size(); ++i) {
    const auto bits = std::bit_cast<uint64_t>(data[i]);
    for (int b = 0; b < 8; ++b)
      bytes[i * 8 + b] = static_cast<uint8_t>((bits >> (8 * b)) & 0xff);
  }
  json j;
  j["shape"] = shape;
  j["data"] = base64_encode(bytes.data(), bytes.size());
  return j;
}

std::vector<double> tensor_from_json(const json& j) {
  const auto shape = j.at("shape").get<std::vector<size_t>>();
  size_t count = 1;
  for (size_t s : shape) count *= s;
  const auto bytes = base64_decode(j.at("data").get<std::string>());
  if (bytes.size() != count * 8)
    throw IoError("tensor byte count does not match its shape");
  std::vector<double> data(count);
  for (size_t i = 0; i < count; ++i) {
    uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<uint64_t>(bytes[i * 8 + b]) << (8 * b);
    data[i] = std::bit_cast<double>(bits);
  }
  return data;
}

json tree_json(const Tree& tree) {
  const auto n = tree.nodes.size();
  std::vector<double> feature(n), threshold(n), left(n), right(n), value(n);
  for (size_t i = 0; i < n; ++i) {
    feature[i] = tree.nodes[i].feature;
    threshold[i] = tree.nodes[i].threshold;
    left[i] = tree.nodes[i].left;
    right[i] = tree.nodes[i].right;
    value[i] = tree.nodes[i].value;
  }
  json j;
  j["feature"] = tensor_json(feature, {n});
  j["threshold"] = tensor_json(threshold, {n});
  j["left"] = tensor_json(left, {n});
  j["right"] = tensor_json(right, {n});
  j["value"] = tensor_json(value, {n});
  return j;
}

Tree tree_from_json(const json& j) {
  const auto feature = tensor_from_json(j.at("feature"));
  const auto threshold = tensor_from_json(j.at("threshold"));
  const auto left = tensor_from_json(j.at("left"));
  const auto right = tensor_from_json(j.at("right"));
  const auto value = tensor_from_json(j.at("value"));
  Tree tree;
  tree.nodes.resize(feature.size());
  for (size_t i = 0; i < feature.size(); ++i) {
    tree.nodes[i].feature = static_cast<int>(feature[i]);
    tree.nodes[i].threshold = threshold[i];
    tree.nodes[i].left = static_cast<int>(left[i]);
    tree.nodes[i].right = static_cast<int>(right[i]);
    tree.nodes[i].value = value[i];
  }
  return tree;
}

json meta_json(const TrainMeta& meta) {
  json h = json::object();
  for (const auto& [name, value] : meta.hyperparameters) h[name] = value;
  json j;
  j["seed"] = meta.seed;
  j["epochs"] = meta.epochs;
  j["hyperparameters"] = h;
  return j;
}

TrainMeta meta_from_json(const json& j) {
  TrainMeta meta;
  meta.seed = j.value("seed", uint64_t{0});
  meta.epochs = j.value("epochs", 0);
  if (j.contains("hyperparameters"))
    for (const auto& [name, value] : j.at("hyperparameters").items())
      meta.hyperparameters.emplace_back(name, value.get<double>());
  return meta;
}

json model_json(const Model& model, FeatureSpace space);

json parameters_json(const Model& model, FeatureSpace space) {
  json p = json::object();
  switch (model.kind()) {
    case ModelKind::LogReg: {
      const auto& m = static_cast<const LogRegModel&>(model);
      p["weights"] = tensor_json(m.weights(), {m.weights().size()});
      p["bias"] = tensor_json({m.bias()}, {1});
      break;
    }
    case ModelKind::Svm: {
      const auto& m = static_cast<const SvmModel&>(model);
      p["weights"] = tensor_json(m.weights(), {m.weights().size()});
      p["bias"] = tensor_json({m.bias()}, {1});
      p["platt"] = tensor_json({m.platt_a(), m.platt_b()}, {2});
      break;
    }
    case ModelKind::Knn: {
      const auto& m = static_cast<const KnnModel&>(model);
      const auto n = m.train_X().size();
      const size_t d = n > 0 ? m.train_X()[0].size() : 0;
      std::vector<double> flat;
      flat.reserve(n * d);
      for (const auto& row : m.train_X())
        flat.insert(flat.end(), row.begin(), row.end());
      std::vector<double> labels(m.train_y().begin(), m.train_y().end());
      p["train_x"] = tensor_json(flat, {n, d});
      p["train_y"] = tensor_json(labels, {n});
      p["k"] = tensor_json({double(m.k())}, {1});
      break;
    }
    case ModelKind::DTree: {
      const auto& m = static_cast<const DTreeModel&>(model);
      p["tree"] = tree_json(m.tree());
      break;
    }
    case ModelKind::RForest: {
      const auto& m = static_cast<const RForestModel&>(model);
      json trees = json::array();
      for (const auto& tree : m.trees) trees.push_back(tree_json(tree));
      p["trees"] = std::move(trees);
      break;
    }
    case ModelKind::GBoost: {
      const auto& m = static_cast<const GBoostModel&>(model);
      p["f0"] = tensor_json({m.f0}, {1});
      p["lr"] = tensor_json({m.lr}, {1});
      json trees = json::array();
      for (const auto& tree : m.trees) trees.push_back(tree_json(tree));
      p["trees"] = std::move(trees);
      break;
    }
    case ModelKind::Ensemble: {
      const auto& m = static_cast<const EnsembleModel&>(model);
      json members = json::array();
      for (const auto& member : m.members)
        members.push_back(model_json(*member, space));
      p["members"] = std::move(members);
      break;
    }
    case ModelKind::Cnn: {
      const auto& m = static_cast<const CnnModel&>(model);
      const auto& s = m.params().spec;
      p["architecture"] = {{"in_rows", s.in_rows},
                           {"in_cols", s.in_cols},
                           {"conv1_filters", s.conv1_filters},
                           {"conv2_filters", s.conv2_filters},
                           {"kernel", s.kernel},
                           {"dense_units", s.dense_units}};
      for (const auto& [name, tensor] : m.params().tensors())
        p[name] = tensor_json(*tensor, {tensor->size()});
      break;
    }
  }
  return p;
}

json model_json(const Model& model, FeatureSpace space) {
  json j;
  j["kind"] = to_string(model.kind());
  j["feature_space"] = to_string(space);
  j["train_meta"] = meta_json(model.train_meta());
  j["parameters"] = parameters_json(model, space);
  return j;
}

std::unique_ptr<Model> model_from(const json& j);

std::unique_ptr<Model> model_from_parameters(ModelKind kind, const json& p) {
  switch (kind) {
    case ModelKind::LogReg:
      return std::make_unique<LogRegModel>(
          tensor_from_json(p.at("weights")),
          tensor_from_json(p.at("bias")).at(0));
    case ModelKind::Svm: {
      const auto platt = tensor_from_json(p.at("platt"));
      if (platt.size() != 2) throw IoError("platt tensor must have 2 values");
      return std::make_unique<SvmModel>(tensor_from_json(p.at("weights")),
                                        tensor_from_json(p.at("bias")).at(0),
                                        platt[0], platt[1]);
    }
    case ModelKind::Knn: {
      const auto shape =
          p.at("train_x").at("shape").get<std::vector<size_t>>();
      if (shape.size() != 2) throw IoError("train_x must be 2-D");
      const auto flat = tensor_from_json(p.at("train_x"));
      FeatureMatrix X(shape[0], FeatureVector(shape[1]));
      for (size_t i = 0; i < shape[0]; ++i)
        for (size_t d = 0; d < shape[1]; ++d) X[i][d] = flat[i * shape[1] + d];
      const auto labels = tensor_from_json(p.at("train_y"));
      LabelVector y(labels.size());
      for (size_t i = 0; i < labels.size(); ++i)
        y[i] = static_cast<int>(labels[i]);
      const int k =
          static_cast<int>(tensor_from_json(p.at("k")).at(0));
      return std::make_unique<KnnModel>(std::move(X), std::move(y), k);
    }
    case ModelKind::DTree:
      return std::make_unique<DTreeModel>(tree_from_json(p.at("tree")));
    case ModelKind::RForest: {
      auto model = std::make_unique<RForestModel>();
      for (const auto& t : p.at("trees"))
        model->trees.push_back(tree_from_json(t));
      return model;
    }
    case ModelKind::GBoost: {
      auto model = std::make_unique<GBoostModel>();
      model->f0 = tensor_from_json(p.at("f0")).at(0);
      model->lr = tensor_from_json(p.at("lr")).at(0);
      for (const auto& t : p.at("trees"))
        model->trees.push_back(tree_from_json(t));
      return model;
    }
    case ModelKind::Ensemble: {
      auto model = std::make_unique<EnsembleModel>();
      for (const auto& member : p.at("members"))
        model->members.push_back(model_from(member));
      return model;
    }
    case ModelKind::Cnn: {
      const auto& a = p.at("architecture");
      CnnSpec spec;
      spec.in_rows = a.at("in_rows").get<int>();
      spec.in_cols = a.at("in_cols").get<int>();
      spec.conv1_filters = a.at("conv1_filters").get<int>();
      spec.conv2_filters = a.at("conv2_filters").get<int>();
      spec.kernel = a.at("kernel").get<int>();
      spec.dense_units = a.at("dense_units").get<int>();
      CnnParams params = make_cnn_params(spec);
      for (auto& [name, tensor] : params.tensors()) {
        auto values = tensor_from_json(p.at(name));
        if (values.size() != tensor->size())
          throw IoError("cnn tensor " + name + " has wrong size");
        *tensor = std::move(values);
      }
      return std::make_unique<CnnModel>(std::move(params));
    }
  }
  throw IoError("unknown model kind value");
}

std::unique_ptr<Model> model_from(const json& j) {
  const auto kind = parse_model_kind(j.at("kind").get<std::string>());
  if (!kind)
    throw IoError("unknown model kind: " + j.at("kind").get<std::string>());
  auto model = model_from_parameters(*kind, j.at("parameters"));
  if (j.contains("train_meta"))
    model->train_meta() = meta_from_json(j.at("train_meta"));
  return model;
}

}  // namespace

std::string model_to_json(const Model& model, FeatureSpace space) {
  return model_json(model, space).dump(2);
}

std::unique_ptr<Model> model_from_json(const std::string& json_text,
                                       FeatureSpace* space_out) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw IoError(std::string("model parse: ") + e.what());
  }
  try {
    if (space_out) {
      const auto space =
          parse_feature_space(j.at("feature_space").get<std::string>());
      if (!space) throw IoError("unknown feature space");
      *space_out = *space;
    }
    return model_from(j);
  } catch (const json::exception& e) {
    throw IoError(std::string("model fields: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const Model& model,
                FeatureSpace space) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path.string());
  out << model_to_json(model, space) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::unique_ptr<Model> load_model(const std::filesystem::path& path,
                                  FeatureSpace* space_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str(), space_out);
}

}  // namespace radioclass
