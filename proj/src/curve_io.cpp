/*
 * Copyright 2026 The hypfay Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hypfay/curve.hpp"

namespace hypfay {

using nlohmann::json;

Curve curve_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, std::string("curve file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::ConfigError, "curve file must hold a JSON object");
  if (!doc.contains("branch_points") || !doc["branch_points"].is_array()) {
    throw Error(ErrorKind::ConfigError, "field 'branch_points' missing or not an array");
  }
  std::string mode = "real";
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) throw Error(ErrorKind::ConfigError, "field 'mode' must be a string");
    mode = doc["mode"].get<std::string>();
    if (mode != "real" && mode != "complex") {
      throw Error(ErrorKind::ConfigError, "field 'mode' must be \"real\" or \"complex\", got \"" + mode + "\"");
    }
  }
  std::vector<cplx> pts;
  for (std::size_t i = 0; i < doc["branch_points"].size(); ++i) {
    const json& v = doc["branch_points"][i];
    const std::string where = "field 'branch_points[" + std::to_string(i) + "]'";
    if (v.is_number()) {
      pts.emplace_back(v.get<double>(), 0.0);
    } else if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      if (mode == "real") throw Error(ErrorKind::ConfigError, where + " is complex but mode is \"real\"");
      pts.emplace_back(v[0].get<double>(), v[1].get<double>());
    } else {
      throw Error(ErrorKind::ConfigError, where + " must be a number or a [re, im] pair");
    }
  }
  try {
    if (mode == "real") {
      std::vector<double> re;
      for (const auto& p : pts) re.push_back(p.real());
      return Curve::real(std::move(re));
    }
    return Curve::complex(std::move(pts));
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, std::string("field 'branch_points': ") + e.what());
  }
}

Curve load_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open curve file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return curve_from_json(ss.str());
}

std::string curve_to_json(const Curve& curve) {
  json doc;
  doc["mode"] = curve.is_real() ? "real" : "complex";
  json pts = json::array();
  for (const auto& p : curve.branch_points()) {
    if (curve.is_real()) {
      pts.push_back(p.real());
    } else {
      pts.push_back({p.real(), p.imag()});
    }
  }
  doc["branch_points"] = pts;
  return doc.dump();
}

}  // namespace hypfay
