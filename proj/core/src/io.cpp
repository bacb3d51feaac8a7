#include "bsforecast/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "bsforecast/errors.hpp"

namespace bsf {

const char* kBlocksCsvHeader =
    "option_id,bid_m2,ask_m2,vol_m2,bid_m1,ask_m1,vol_m1,bid_0,ask_0,vol_0,"
    "stock_bid_0,stock_ask_0,real_p1,real_p2";

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) {
    throw InputError(what + ": not a number: '" + text + "'");
  }
  return v;
}

long parse_long(const std::string& text, const std::string& what) {
  long v = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) {
    throw InputError(what + ": not an integer: '" + text + "'");
  }
  return v;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(trim(current));
  return fields;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "' for reading");
  return in;
}

DataBlock parse_block_row(const std::vector<std::string>& f) {
  if (f.size() != 14) {
    throw InputError("expected 14 fields, got " + std::to_string(f.size()));
  }
  DataBlock block;
  block.option_id = f[0];
  if (block.option_id.empty()) throw InputError("empty option_id");
  const char* day_names[3] = {"m2", "m1", "0"};
  for (int d = 0; d < 3; ++d) {
    const std::string tag = day_names[d];
    block.days[d].option_bid = parse_double(f[1 + 3 * d], "bid_" + tag);
    block.days[d].option_ask = parse_double(f[2 + 3 * d], "ask_" + tag);
    block.days[d].volatility = parse_double(f[3 + 3 * d], "vol_" + tag);
  }
  block.days[2].stock_bid = parse_double(f[10], "stock_bid_0");
  block.days[2].stock_ask = parse_double(f[11], "stock_ask_0");
  if (!f[12].empty()) block.real_plus1 = parse_double(f[12], "real_p1");
  if (!f[13].empty()) block.real_plus2 = parse_double(f[13], "real_p2");
  block.validate();
  return block;
}

}  // namespace

BlockParseResult read_blocks_csv(const std::string& path, bool strict) {
  std::ifstream in = open_in(path);
  BlockParseResult result;
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError("'" + path + "': empty file, header required");
  }
  {
    std::string got;
    for (const std::string& h : split_csv(line)) {
      if (!got.empty()) got += ',';
      got += h;
    }
    if (got != kBlocksCsvHeader) {
      throw InputError("'" + path + "': bad header, expected '" +
                       kBlocksCsvHeader + "'");
    }
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      result.blocks.push_back(parse_block_row(split_csv(line)));
    } catch (const InputError& e) {
      if (strict) {
        throw InputError("'" + path + "' line " + std::to_string(line_no) +
                         ": " + e.what());
      }
      result.issues.push_back({line_no, e.what()});
    }
  }
  return result;
}

void write_blocks_csv(const std::string& path,
                      const std::vector<DataBlock>& blocks) {
  std::ofstream out = open_out(path);
  out << kBlocksCsvHeader << "\n";
  for (const DataBlock& b : blocks) {
    out << b.option_id;
    for (int d = 0; d < 3; ++d) {
      out << ',' << format_double(b.days[d].option_bid) << ','
          << format_double(b.days[d].option_ask) << ','
          << format_double(b.days[d].volatility);
    }
    out << ',' << format_double(*b.days[2].stock_bid) << ','
        << format_double(*b.days[2].stock_ask);
    out << ',' << (b.real_plus1 ? format_double(*b.real_plus1) : "");
    out << ',' << (b.real_plus2 ? format_double(*b.real_plus2) : "");
    out << "\n";
  }
}

void write_forecasts_csv(const std::string& path,
                         const std::vector<Forecast>& forecasts) {
  std::ofstream out = open_out(path);
  out << "option_id,est_p1,est_p2,err,beta,M,converged\n";
  for (const Forecast& f : forecasts) {
    out << f.option_id << ',' << format_double(f.est_plus1) << ','
        << format_double(f.est_plus2) << ','
        << (f.err ? format_double(*f.err) : "") << ','
        << format_double(f.beta_used) << ',' << f.M_used << ','
        << (f.converged ? "true" : "false") << "\n";
  }
}

std::vector<Forecast> read_forecasts_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) ||
      trim(line) != "option_id,est_p1,est_p2,err,beta,M,converged") {
    throw InputError("'" + path + "': bad forecasts header");
  }
  std::vector<Forecast> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 7) {
      throw InputError("'" + path + "' line " + std::to_string(line_no) +
                       ": expected 7 fields");
    }
    Forecast fc;
    fc.option_id = f[0];
    fc.est_plus1 = parse_double(f[1], "est_p1");
    fc.est_plus2 = parse_double(f[2], "est_p2");
    if (!f[3].empty()) fc.err = parse_double(f[3], "err");
    fc.beta_used = parse_double(f[4], "beta");
    fc.M_used = static_cast<int>(parse_long(f[5], "M"));
    fc.converged = f[6] == "true";
    out.push_back(std::move(fc));
  }
  return out;
}

void write_histogram_csv(const std::string& path,
                         const std::vector<HistogramBin>& bins) {
  std::ofstream out = open_out(path);
  out << "bin_low,bin_high,count\n";
  for (const HistogramBin& b : bins) {
    out << format_double(b.low) << ','
        << (std::isinf(b.high) ? "inf" : format_double(b.high)) << ','
        << b.count << "\n";
  }
}

void write_features_csv(const std::string& path,
                        const std::vector<FeatureVector>& features) {
  std::ofstream out = open_out(path);
  out << "option_id,est_p1,est_p2,stock_bid_0,stock_ask_0,bid_m2,ask_m2,vol_m2,"
         "bid_m1,ask_m1,vol_m1,bid_0,ask_0,vol_0,label\n";
  for (const FeatureVector& fv : features) {
    out << fv.option_id;
    for (double v : fv.x) out << ',' << format_double(v);
    out << ',' << fv.label << "\n";
  }
}

std::vector<FeatureVector> read_features_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError("'" + path + "': empty features file");
  }
  std::vector<FeatureVector> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != kFeatureCount + 2) {
      throw InputError("'" + path + "' line " + std::to_string(line_no) +
                       ": expected " + std::to_string(kFeatureCount + 2) +
                       " fields");
    }
    FeatureVector fv;
    fv.option_id = f[0];
    for (int k = 0; k < kFeatureCount; ++k) {
      fv.x[k] = parse_double(f[1 + k], "feature " + std::to_string(k));
    }
    const long label = parse_long(f[kFeatureCount + 1], "label");
    if (label != 0 && label != 1) {
      throw InputError("'" + path + "' line " + std::to_string(line_no) +
                       ": label must be 0 or 1");
    }
    fv.label = static_cast<int>(label);
    out.push_back(std::move(fv));
  }
  return out;
}

void write_curve_csv(const std::string& path, const CurveWithBands& curve) {
  std::ofstream out = open_out(path);
  out << "epoch,mean_eval_loss,std_eval_loss\n";
  for (size_t e = 0; e < curve.epochs.size(); ++e) {
    out << curve.epochs[e] << ',' << format_double(curve.mean_eval_loss[e])
        << ',' << format_double(curve.std_eval_loss[e]) << "\n";
  }
}

namespace {

nlohmann::json histogram_json(const std::vector<HistogramBin>& bins) {
  nlohmann::json arr = nlohmann::json::array();
  for (const HistogramBin& b : bins) {
    arr.push_back({{"bin_low", b.low},
                   {"bin_high", std::isinf(b.high)
                                    ? nlohmann::json("inf")
                                    : nlohmann::json(b.high)},
                   {"count", b.count}});
  }
  return arr;
}

}  // namespace

void write_backtest_json(const std::string& path,
                         const std::vector<BacktestReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const BacktestReport& r : reports) {
    arr.push_back({{"method", r.method},
                   {"n_options", r.n_options},
                   {"n_traded", r.n_traded},
                   {"n_no_trade", r.n_no_trade},
                   {"total_pnl", r.total_pnl},
                   {"gross_profit", r.gross_profit},
                   {"gross_loss", r.gross_loss},
                   {"pct_profit", r.pct_profit},
                   {"pct_loss", r.pct_loss},
                   {"pct_zero", r.pct_zero},
                   {"pnl_histogram", histogram_json(r.pnl_histogram)},
                   {"skipped", r.skipped}});
  }
  std::ofstream out = open_out(path);
  out << arr.dump(2) << "\n";
}

void write_model_json(const std::string& path, const NetworkParams& net,
                      const NormStats& stats) {
  nlohmann::json j;
  j["layer_sizes"] = net.sizes;
  j["weights"] = net.weights;
  j["biases"] = net.biases;
  j["norm_mean"] = stats.mean;
  j["norm_std"] = stats.stddev;
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

void read_model_json(const std::string& path, NetworkParams& net,
                     NormStats& stats) {
  std::ifstream in = open_in(path);
  nlohmann::json j;
  try {
    in >> j;
    net.sizes = j.at("layer_sizes").get<std::vector<int>>();
    net.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    net.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    const auto mean = j.at("norm_mean").get<std::vector<double>>();
    const auto stddev = j.at("norm_std").get<std::vector<double>>();
    if (mean.size() != kFeatureCount || stddev.size() != kFeatureCount) {
      throw InputError("normalization stats must have 13 entries");
    }
    std::copy(mean.begin(), mean.end(), stats.mean.begin());
    std::copy(stddev.begin(), stddev.end(), stats.stddev.begin());
  } catch (const nlohmann::json::exception& e) {
    throw InputError("'" + path + "': malformed model file: " + e.what());
  }
  if (net.sizes.size() < 2 || net.weights.size() != net.sizes.size() - 1 ||
      net.biases.size() != net.sizes.size() - 1) {
    throw InputError("'" + path + "': inconsistent layer shapes");
  }
  for (size_t l = 0; l + 1 < net.sizes.size(); ++l) {
    const size_t expect_w =
        static_cast<size_t>(net.sizes[l]) * static_cast<size_t>(net.sizes[l + 1]);
    if (net.weights[l].size() != expect_w ||
        net.biases[l].size() != static_cast<size_t>(net.sizes[l + 1])) {
      throw InputError("'" + path + "': weight shapes do not chain");
    }
  }
}

std::map<std::string, std::string> load_key_values(const std::string& path) {
  std::ifstream in = open_in(path);
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw InputError("'" + path + "' line " + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) {
      throw InputError("'" + path + "' line " + std::to_string(line_no) +
                       ": empty key");
    }
    kv[key] = value;
  }
  return kv;
}

}  // namespace bsf
