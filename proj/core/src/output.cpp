#include "hwdd/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hwdd/version.hpp"

namespace hwdd {

namespace {

using nlohmann::json;

void write_file(const std::string& dir, const std::string& name, const std::string& body) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error(dir + ": cannot create output directory: " + ec.message());
  fs::path p = fs::path(dir) / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error(p.string() + ": cannot open for writing");
  out << body;
  if (!out) throw std::runtime_error(p.string() + ": write failed");
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

// ---- minimal SVG line-plot writer ----------------------------------------

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
  std::vector<std::string> annotations;  // drawn under the legend
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

std::string fmt_tick(double v) {
  char buf[64];
  double a = std::abs(v);
  if (v == 0.0)
    std::snprintf(buf, sizeof buf, "0");
  else if (a >= 1e4 || a < 1e-3)
    std::snprintf(buf, sizeof buf, "%.0e", v);
  else
    std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '&') o += "&amp;";
    else if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else o += c;
  }
  return o;
}

std::string render_svg(const std::vector<Series>& series, const PlotSpec& spec) {
  const double W = 860, H = 560;
  const double ml = 78, mr = 24, mt = 44, mb = 58;  // margins
  const double pw = W - ml - mr, ph = H - mt - mb;  // plot box

  auto tx = [&](double v) { return spec.logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.logy ? std::log10(v) : v; };

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const Series& s : series)
    for (size_t k = 0; k < s.x.size(); ++k) {
      if (spec.logx && !(s.x[k] > 0)) continue;
      if (spec.logy && !(s.y[k] > 0)) continue;
      xmin = std::min(xmin, tx(s.x[k]));
      xmax = std::max(xmax, tx(s.x[k]));
      ymin = std::min(ymin, ty(s.y[k]));
      ymax = std::max(ymax, ty(s.y[k]));
    }
  if (xmin > xmax) { xmin = 0; xmax = 1; }
  if (ymin > ymax) { ymin = 0; ymax = 1; }
  if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
  if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }
  double xpad = 0.03 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
  xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

  auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double v) { return mt + ph - (ty(v) - ymin) / (ymax - ymin) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
      << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
      << "<g font-family=\"sans-serif\" font-size=\"13\">\n";

  // ticks: in log space place at integer decades, else 6 linear divisions
  auto ticks = [&](double lo, double hi, bool logscale) {
    std::vector<double> t;
    if (logscale) {
      for (int e = (int)std::ceil(lo - 1e-9); e <= (int)std::floor(hi + 1e-9); ++e)
        t.push_back(e);
      if (t.size() < 2)
        for (int k = 0; k <= 5; ++k) t.push_back(lo + (hi - lo) * k / 5.0);
    } else {
      for (int k = 0; k <= 5; ++k) t.push_back(lo + (hi - lo) * k / 5.0);
    }
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
  };

  for (double t : ticks(xmin, xmax, spec.logx)) {
    double x = ml + (t - xmin) / (xmax - xmin) * pw;
    svg << "<line x1=\"" << x << "\" y1=\"" << mt << "\" x2=\"" << x << "\" y2=\"" << mt + ph
        << "\" stroke=\"#e0e0e0\"/>\n";
    double shown = spec.logx ? std::pow(10.0, t) : t;
    svg << "<text x=\"" << x << "\" y=\"" << mt + ph + 18
        << "\" text-anchor=\"middle\">" << fmt_tick(shown) << "</text>\n";
  }
  for (double t : ticks(ymin, ymax, spec.logy)) {
    double y = mt + ph - (t - ymin) / (ymax - ymin) * ph;
    svg << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << ml + pw << "\" y2=\"" << y
        << "\" stroke=\"#e0e0e0\"/>\n";
    double shown = spec.logy ? std::pow(10.0, t) : t;
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\">" << fmt_tick(shown) << "</text>\n";
  }

  svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#444\"/>\n";

  for (size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    const char* color = kPalette[i % (sizeof kPalette / sizeof *kPalette)];
    std::ostringstream pts;
    bool pen_up = true;
    for (size_t k = 0; k < s.x.size(); ++k) {
      if ((spec.logx && !(s.x[k] > 0)) || (spec.logy && !(s.y[k] > 0))) {
        pen_up = true;
        continue;
      }
      pts << (pen_up ? "M" : "L") << px(s.x[k]) << " " << py(s.y[k]) << " ";
      pen_up = false;
    }
    svg << "<path d=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.8\"/>\n";
    for (size_t k = 0; k < s.x.size(); ++k) {
      if ((spec.logx && !(s.x[k] > 0)) || (spec.logy && !(s.y[k] > 0))) continue;
      svg << "<circle cx=\"" << px(s.x[k]) << "\" cy=\"" << py(s.y[k])
          << "\" r=\"2.4\" fill=\"" << color << "\"/>\n";
    }
  }

  // legend, top-right inside the box
  double lx = ml + pw - 218, ly = mt + 12;
  double lh = 18.0 * (series.size() + spec.annotations.size()) + 12;
  svg << "<rect x=\"" << lx - 8 << "\" y=\"" << ly - 12 << "\" width=\"218\" height=\"" << lh
      << "\" fill=\"white\" fill-opacity=\"0.85\" stroke=\"#bbb\"/>\n";
  for (size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof kPalette / sizeof *kPalette)];
    double y = ly + 18.0 * i;
    svg << "<line x1=\"" << lx << "\" y1=\"" << y << "\" x2=\"" << lx + 22 << "\" y2=\"" << y
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << lx + 28 << "\" y=\"" << y + 4 << "\">"
        << xml_escape(series[i].label) << "</text>\n";
  }
  for (size_t i = 0; i < spec.annotations.size(); ++i) {
    double y = ly + 18.0 * (series.size() + i);
    svg << "<text x=\"" << lx << "\" y=\"" << y + 4 << "\" font-style=\"italic\">"
        << xml_escape(spec.annotations[i]) << "</text>\n";
  }

  svg << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << xml_escape(spec.title) << "</text>\n"
      << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 14
      << "\" text-anchor=\"middle\">" << xml_escape(spec.xlabel) << "</text>\n"
      << "<text x=\"18\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << mt + ph / 2 << ")\">"
      << xml_escape(spec.ylabel) << "</text>\n"
      << "</g>\n</svg>\n";
  return svg.str();
}

json matrix_json(const Operator& op) {
  json rows = json::array();
  for (int r = 0; r < op.side(); ++r) {
    json row = json::array();
    for (int c = 0; c < op.side(); ++c) {
      Cx v = op.matrix()(r, c);
      row.push_back({v.real(), v.imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string result_csv(const ExperimentResult& r) {
  std::ostringstream out;
  out << "time_us,fidelity_mean,fidelity_stderr,label,sequence,d,seed\n";
  for (const Curve& c : r.curves) {
    if (c.mean.size() != r.times.size() || c.stderr_.size() != r.times.size())
      throw NumericError("result_csv: curve length does not match the time grid");
    for (size_t k = 0; k < r.times.size(); ++k)
      out << format_g17(r.times[k]) << ',' << format_g17(c.mean[k]) << ','
          << format_g17(c.stderr_[k]) << ',' << csv_quote(c.label) << ','
          << csv_quote(c.sequence) << ',' << r.d << ',' << r.seed << '\n';
  }
  return out.str();
}

void emit_outputs(const ExperimentResult& r, const std::string& dir) {
  if (r.times.empty()) throw ConfigError("emit_outputs: empty time grid");
  for (const Curve& c : r.curves)
    for (double v : c.mean)
      if (!(v >= -1e-9 && v <= 1.0 + 1e-9))
        throw NumericError("emit_outputs: fidelity outside [0,1]");

  write_file(dir, "result.csv", result_csv(r));

  json meta;
  meta["library_version"] = kVersion;
  meta["experiment"] = r.experiment;
  meta["d"] = r.d;
  meta["seed"] = r.seed;
  meta["curves"] = json::array();
  for (const Curve& c : r.curves) {
    json jc;
    jc["label"] = c.label;
    jc["sequence"] = c.sequence;
    jc["fidelity_mean"] = c.mean;
    jc["fidelity_stderr"] = c.stderr_;
    meta["curves"].push_back(std::move(jc));
  }
  meta["time_us"] = r.times;
  if (!r.config_json.empty()) meta["config"] = json::parse(r.config_json);
  for (size_t i = 0; i < r.final_rho.size(); ++i) {
    json rho;
    rho["label"] = r.curves[i].label;
    rho["matrix_re_im"] = matrix_json(r.final_rho[i]);
    meta["final_density_matrices"].push_back(std::move(rho));
  }
  write_file(dir, "result.json", meta.dump(2) + "\n");

  std::vector<Series> series;
  for (const Curve& c : r.curves) series.push_back({c.label, r.times, c.mean});
  PlotSpec spec;
  spec.title = r.experiment + " (d=" + std::to_string(r.d) + ")";
  spec.xlabel = "total time (us)";
  spec.ylabel = "fidelity";
  write_file(dir, "plot.svg", render_svg(series, spec));
}

void emit_scaling_outputs(const ScalingResult& r, const std::string& label,
                          const std::string& config_json, std::uint64_t seed,
                          const std::string& dir) {
  if (r.tau_values.empty()) throw ConfigError("emit_scaling_outputs: empty tau sweep");

  std::ostringstream csv;
  csv << "tau_us,infidelity,label,seed\n";
  for (size_t k = 0; k < r.tau_values.size(); ++k)
    csv << format_g17(r.tau_values[k]) << ',' << format_g17(r.infidelities[k]) << ','
        << csv_quote(label) << ',' << seed << '\n';
  write_file(dir, "result.csv", csv.str());

  json meta;
  meta["library_version"] = kVersion;
  meta["experiment"] = "scaling";
  meta["label"] = label;
  meta["seed"] = seed;
  meta["tau_us"] = r.tau_values;
  meta["infidelity"] = r.infidelities;
  meta["fit"] = {{"slope", r.slope},
                 {"intercept", r.intercept},
                 {"r_squared", r.r_squared},
                 {"points_used", r.points_used}};
  if (!config_json.empty()) meta["config"] = json::parse(config_json);
  write_file(dir, "result.json", meta.dump(2) + "\n");

  std::vector<Series> series;
  series.push_back({label, r.tau_values, r.infidelities});
  // fitted power law over the data span, drawn as a second series
  Series fitline;
  fitline.label = "fit";
  for (double t : r.tau_values) {
    if (!(t > 0)) continue;
    fitline.x.push_back(t);
    fitline.y.push_back(std::exp(r.intercept + r.slope * std::log(t)));
  }
  series.push_back(std::move(fitline));

  PlotSpec spec;
  spec.title = "infidelity scaling: " + label;
  spec.xlabel = "tau (us)";
  spec.ylabel = "infidelity";
  spec.logx = spec.logy = true;
  char ann[96];
  std::snprintf(ann, sizeof ann, "slope = %.3f  (r^2 = %.5f)", r.slope, r.r_squared);
  spec.annotations.push_back(ann);
  write_file(dir, "plot.svg", render_svg(series, spec));
}

}  // namespace hwdd
