// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#include "qdc/json_io.hpp"

#include <fstream>

namespace qdc {

json matrix_to_json(const CMatrix& m) {
  json re = json::array(), im = json::array();
  for (long r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ri = json::array();
    for (long c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

CMatrix matrix_from_json(const json& j) {
  try {
    const json& re = j.at("re");
    const bool has_im = j.contains("im");
    const long rows = static_cast<long>(re.size());
    const long cols = rows ? static_cast<long>(re.at(0).size()) : 0;
    CMatrix m(rows, cols);
    for (long r = 0; r < rows; ++r) {
      if (static_cast<long>(re.at(r).size()) != cols)
        throw Error(ErrorKind::InvalidArgument, "matrix JSON rows have different lengths");
      for (long c = 0; c < cols; ++c) {
        const double x = re.at(r).at(c).get<double>();
        const double y = has_im ? j.at("im").at(r).at(c).get<double>() : 0.0;
        m(r, c) = cd(x, y);
      }
    }
    if (has_im && static_cast<long>(j.at("im").size()) != rows)
      throw Error(ErrorKind::InvalidArgument, "matrix JSON re/im shapes differ");
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed matrix JSON: ") + e.what());
  }
}

json state_to_json(const StateOperator& s) {
  json dims = json::array();
  for (const auto& sub : s.dims().subsystems()) dims.push_back({{"label", sub.label}, {"dim", sub.dim}});
  return json{{"dims", std::move(dims)}, {"matrix", matrix_to_json(s.matrix())}};
}

StateOperator state_from_json(const json& j) {
  std::vector<Subsystem> subs;
  try {
    for (const auto& d : j.at("dims")) subs.push_back({d.at("label").get<std::string>(), d.at("dim").get<int>()});
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed state JSON: ") + e.what());
  }
  DimsLabel dims(std::move(subs));
  if (!j.contains("matrix")) throw Error(ErrorKind::InvalidArgument, "state JSON has no matrix");
  return StateOperator(std::move(dims), matrix_from_json(j.at("matrix")));
}

json channel_to_json(const Channel& ch) {
  return json{{"dim_in", ch.dim_in()}, {"dim_out", ch.dim_out()}, {"choi", state_to_json(ch.choi())}};
}

Channel channel_from_json(const json& j) {
  try {
    const int din = j.at("dim_in").get<int>();
    const int dout = j.at("dim_out").get<int>();
    const json& c = j.at("choi");
    CMatrix m = matrix_from_json(c.at("matrix"));
    return Channel(din, dout, std::move(m));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed channel JSON: ") + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, "cannot parse '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace qdc
