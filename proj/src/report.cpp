#include "report.hpp"

#include <fstream>
#include <sstream>

namespace wlab {

std::string RunConfig::serialized() const {
    std::string s = "subcommand=" + subcommand + "\n";
    for (const auto& [k, v] : options) s += k + "=" + v + "\n";
    return s;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Error::io_error, "cannot open config " + path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        size_t h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto strip = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string k = strip(line.substr(0, eq)), v = strip(line.substr(eq + 1));
        if (!k.empty()) out[k] = v;
    }
    return out;
}

CsvWriter::CsvWriter(std::string path, const RunConfig& cfg,
                     const std::vector<std::string>& input_hashes,
                     std::vector<std::string> columns)
    : path_(std::move(path)), ncols_(columns.size()) {
    buf_ += "# config_hash: " + cfg.hash() + "\n";
    for (const auto& [k, v] : cfg.options) buf_ += "# " + k + ": " + v + "\n";
    for (size_t i = 0; i < input_hashes.size(); ++i)
        buf_ += "# input" + std::to_string(i) + "_sha256: " + input_hashes[i] + "\n";
    for (size_t i = 0; i < columns.size(); ++i)
        buf_ += columns[i] + (i + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != ncols_) throw Error(Error::internal, "csv row width mismatch");
    for (size_t i = 0; i < cells.size(); ++i)
        buf_ += cells[i] + (i + 1 < cells.size() ? "," : "\n");
}

void CsvWriter::close() {
    if (closed_) return;
    closed_ = true;
    if (path_ == "-") {
        fwrite(buf_.data(), 1, buf_.size(), stdout);
        return;
    }
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw Error(Error::io_error, "cannot write " + path_);
    out.write(buf_.data(), std::streamsize(buf_.size()));
}

CsvWriter::~CsvWriter() {
    try {
        close();
    } catch (...) {
    }
}

std::string file_sha256(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Error::io_error, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

}  // namespace wlab
