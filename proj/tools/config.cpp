#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>

#include "fph/errors.hpp"

namespace fph::cli {

std::vector<double> Range::values() const {
  std::vector<double> out;
  if (points <= 1) {
    out.push_back(min);
    return out;
  }
  for (int i = 0; i < points; ++i) out.push_back(min + (max - min) * i / (points - 1));
  return out;
}

namespace {

template <typename T>
void read(const YAML::Node& node, const char* key, T& target) {
  if (node && node[key]) target = node[key].as<T>();
}

Range read_range(const YAML::Node& node) {
  Range r;
  if (node.IsScalar()) {
    r.min = r.max = node.as<double>();
    return r;
  }
  read(node, "min", r.min);
  read(node, "max", r.max);
  read(node, "points", r.points);
  if (r.points < 1) throw Error(ErrorKind::ConfigError, "range needs points >= 1");
  return r;
}

InsertionPoint read_insertion(const YAML::Node& node) {
  InsertionPoint p;
  read(node, "r", p.r);
  read(node, "q", p.q);
  read(node, "x", p.x);
  read(node, "t", p.t);
  if ((p.r != 1 && p.r != -1) || (p.q != 1 && p.q != -1)) {
    throw Error(ErrorKind::ConfigError, "insertions need r and q in {+1, -1}");
  }
  return p;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  try {
    const YAML::Node root = YAML::Load(text);
    if (const YAML::Node m = root["model"]) {
      read(m, "v_f", cfg.model.vF);
      read(m, "v_p", cfg.model.vP);
      read(m, "lambda", cfg.model.lambda);
      read(m, "g", cfg.model.g);
      read(m, "a", cfg.model.a);
      read(m, "L", cfg.model.L);
      if (m["omega0"]) cfg.model.omega0 = m["omega0"].as<double>();
    }
    read(root["grid"], "K", cfg.K);
    if (root["spectrum"] && root["spectrum"]["e_max"]) cfg.e_max = root["spectrum"]["e_max"].as<double>();

    auto& corr = cfg.correlator;
    corr.spec.insertions = {{1, -1, 1.0, 0.0}, {1, 1, 0.0, 0.0}};
    if (const YAML::Node c = root["correlator"]) {
      read(c, "ell", corr.spec.ell);
      read(c, "regulator", corr.spec.regulator);
      read(c, "mode", corr.mode);
      if (const YAML::Node ins = c["insertions"]) {
        corr.spec.insertions.clear();
        for (const auto& item : ins) corr.spec.insertions.push_back(read_insertion(item));
      }
      if (const YAML::Node s = c["sweep"]) {
        read(s, "index", corr.sweep.index);
        if (s["x"]) corr.sweep.x = read_range(s["x"]);
        if (s["t"]) corr.sweep.t = read_range(s["t"]);
      }
    }
    if (corr.sweep.index >= corr.spec.insertions.size() && !corr.spec.insertions.empty()) {
      throw Error(ErrorKind::ConfigError, "sweep index out of range");
    }

    if (const YAML::Node s = root["scan"]) {
      if (s["gamma1"]) {
        cfg.scan.first = read_range(s["gamma1"]);
        cfg.scan.first_is_gamma = true;
      } else if (s["lambda"]) {
        cfg.scan.first = read_range(s["lambda"]);
      }
      if (s["gamma2"]) {
        cfg.scan.second = read_range(s["gamma2"]);
        cfg.scan.second_is_gamma = true;
      } else if (s["g"]) {
        cfg.scan.second = read_range(s["g"]);
      }
    } else {
      cfg.scan.first.min = cfg.scan.first.max = cfg.model.lambda;
      cfg.scan.second.min = cfg.scan.second.max = cfg.model.g;
    }

    if (const YAML::Node o = root["output"]) {
      if (o["format"]) cfg.format = o["format"].as<std::string>();
      if (o["path"]) cfg.output = o["path"].as<std::string>();
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace fph::cli
