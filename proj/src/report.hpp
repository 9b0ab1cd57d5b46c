#pragma once

// Report plumbing: every CLI run serializes its full configuration into the
// output header together with input-data hashes, so identical inputs give
// byte-identical outputs and any run can be reproduced from its report.

#include <map>

#include "common.hpp"

namespace wlab {

struct RunConfig {
    std::string subcommand;
    std::map<std::string, std::string> options;  // flattened flags, sorted by key

    void set(const std::string& k, const std::string& v) { options[k] = v; }
    void set(const std::string& k, int64_t v) { options[k] = std::to_string(v); }
    void set(const std::string& k, double v) { options[k] = fmt_g17(v); }
    std::string serialized() const;
    std::string hash() const { return sha256_hex(serialized()); }
};

// TOML-like key=value file; flags override file entries
std::map<std::string, std::string> parse_config_file(const std::string& path);

class CsvWriter {
public:
    CsvWriter(std::string path, const RunConfig& cfg,
              const std::vector<std::string>& input_hashes, std::vector<std::string> columns);
    void row(const std::vector<std::string>& cells);
    void close();
    ~CsvWriter();

private:
    std::string path_;
    std::string buf_;
    size_t ncols_;
    bool closed_ = false;
};

std::string file_sha256(const std::string& path);

}  // namespace wlab
