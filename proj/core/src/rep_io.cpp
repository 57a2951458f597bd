#include "ymlab/rep_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ymlab/errors.hpp"

namespace ymlab {

using ordered_json = nlohmann::ordered_json;

GroupElement central_element(const LieContext& ctx, const AlgebraElement& x_xi, int twist) {
  GroupElement c = exp_alg(ctx, x_xi);
  if (twist == -1) {
    if (ctx.discrete_center().empty()) {
      throw ConfigError("central twist -1 is only available for su2");
    }
    c.m = c.m * ctx.discrete_center()[0];
  } else if (twist != 1) {
    throw ConfigError("central twist must be +1 or -1");
  }
  return c;
}

int central_twist_of(const CentralRep& rep) {
  GroupElement ex = exp_alg(*rep.ctx, rep.x_xi);
  if ((ex.m - rep.c.m).norm() <= 1e-8) return 1;
  return -1;
}

std::string rep_to_string(const CentralRep& rep) {
  ordered_json doc;
  doc["format"] = "ymlab-rep";
  doc["version"] = 1;
  doc["group"] = group_id_name(rep.ctx->id());
  doc["genus"] = rep.genus;
  doc["x_xi"] = std::vector<double>(rep.x_xi.coeffs.data(),
                                    rep.x_xi.coeffs.data() + rep.x_xi.coeffs.size());
  doc["central_twist"] = central_twist_of(rep);
  ordered_json images = ordered_json::array();
  for (const auto& g : rep.images) {
    ordered_json rows = ordered_json::array();
    for (int r = 0; r < g.m.rows(); ++r) {
      for (int c = 0; c < g.m.cols(); ++c) {
        rows.push_back({g.m(r, c).real(), g.m(r, c).imag()});
      }
    }
    images.push_back(rows);
  }
  doc["images"] = images;
  return doc.dump(2) + "\n";
}

CentralRep rep_from_string(const std::string& text, double defect_tol) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw SchemaError(std::string("representation file: parse error: ") + e.what());
  }
  if (!doc.contains("format") || doc["format"] != "ymlab-rep") {
    throw SchemaError("representation file: missing or wrong format field");
  }
  if (!doc.contains("version") || doc["version"].get<int>() != 1) {
    throw SchemaError("representation file: missing or unsupported version");
  }
  auto ctx = LieContext::make(group_id_from_name(doc.at("group").get<std::string>()));
  int genus = doc.at("genus").get<int>();
  std::vector<double> xxi = doc.at("x_xi").get<std::vector<double>>();
  if (static_cast<int>(xxi.size()) != ctx->dim_g()) {
    throw SchemaError("representation file: x_xi has wrong dimension");
  }
  AlgebraElement x_xi{Eigen::Map<Eigen::VectorXd>(xxi.data(), xxi.size())};
  int twist = doc.contains("central_twist") ? doc["central_twist"].get<int>() : 1;
  GroupElement c = central_element(*ctx, x_xi, twist);

  const int d = ctx->mat_dim();
  std::vector<GroupElement> images;
  for (const auto& mat : doc.at("images")) {
    if (static_cast<int>(mat.size()) != d * d) {
      throw SchemaError("representation file: image matrix has wrong size");
    }
    Eigen::MatrixXcd m(d, d);
    int idx = 0;
    for (int r = 0; r < d; ++r) {
      for (int cc = 0; cc < d; ++cc) {
        m(r, cc) = std::complex<double>(mat[idx][0].get<double>(), mat[idx][1].get<double>());
        ++idx;
      }
    }
    images.push_back(GroupElement{m});
  }
  return make_central_rep(ctx, genus, std::move(images), c, x_xi, defect_tol);
}

void write_rep_file(const CentralRep& rep, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << rep_to_string(rep);
}

CentralRep read_rep_file(const std::string& path, double defect_tol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return rep_from_string(ss.str(), defect_tol);
}

}  // namespace ymlab
