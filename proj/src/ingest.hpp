#pragma once

// Coefficient ingestion: the .wform file format, the validation battery that
// gates every downstream computation, the remote-database client and its
// content-addressed cache.
//
// File format (line-oriented UTF-8):
//   #wlab-form v1
//   level: 25
//   weight: 2
//   char: p=5 c=2 k=2 g=2      (c=0 means the trivial nebentypus)
//   embedding: 0
//   count: 6000
//   lvalue: <re> <im>          (optional, analytic normalization)
//   petersson: <x>             (optional)
//   petersson_err: <x>         (optional)
//   source: <free text>
//   sha256: <hex of the row block>
//   n re im                    (rows; a_n in the analytic normalization)
//
// An `empty: true` file declares a dimension-zero space: emptiness is data.

#include <optional>

#include "characters.hpp"

namespace wlab {

// Nebentypus mod N as a product of prime-power characters (empty = trivial).
class Nebentypus {
public:
    Nebentypus() = default;
    Nebentypus(int64_t N, std::vector<DirichletChar> locals);

    int64_t modulus() const { return N_; }
    const std::vector<DirichletChar>& locals() const { return locals_; }
    cplx operator()(int64_t n) const;
    int64_t conductor() const;
    bool primitive() const { return conductor() == N_; }
    bool trivial() const { return locals_.empty(); }

private:
    int64_t N_ = 1;
    std::vector<DirichletChar> locals_;
};

struct FormFile {
    int64_t level = 0;
    int weight = 2;
    int64_t char_p = 0, char_k = 0, char_g = 0;
    int char_c = 0;
    bool empty_space = false;
    int embedding = 0;
    std::vector<cplx> a;  // 1-based; a[0] unused
    std::optional<cplx> lvalue;
    std::optional<double> petersson, petersson_err;
    std::string source;
    std::string sha256;
};

FormFile parse_form_file(const std::string& path);
void write_form_file(const FormFile& f, const std::string& path);

struct CheckResult {
    std::string name;
    double worst = 0;   // worst residual
    bool must = true;   // blocking tier
    bool pass = true;
    bool warn = false;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool blocked() const;
    std::string summary() const;
};

struct NewformData {
    int64_t level = 0;
    Nebentypus neben;
    std::vector<cplx> a;  // 1-based analytic coefficients
    std::optional<cplx> lvalue;
    std::optional<double> petersson, petersson_err;
    std::string source, sha256;

    int64_t count() const { return a.empty() ? 0 : int64_t(a.size()) - 1; }
};

// MUST checks block at 1e-6, SHOULD checks warn at 1e-9; external data are
// decimal embeddings of algebraic numbers, so the tiers are deliberate.
ValidationReport validate_form(const NewformData& f);

// parse + checksum + validation; throws Error::validation_failed with the
// itemized report when a MUST check fails. Empty-space files yield a
// NewformData with count 0.
NewformData load_form(const std::string& path);

NewformData form_from_file(const FormFile& f);  // no validation

// ---- remote database client ----

struct FetchSpec {
    std::string base_url;  // e.g. http://127.0.0.1:8700; WLAB_DB_URL by default
    int64_t level = 0;
    int weight = 2;
    int64_t char_p = 0, char_k = 0;
    int char_c = 0;
    int64_t min_coeffs = 1000;
    std::string cache_dir = "wlab-cache";
    bool offline = false;
    int max_attempts = 3;
    int backoff_ms = 200;  // doubled per attempt
};

struct FetchResult {
    std::vector<std::string> form_paths;  // converted .wform files in the cache
    bool from_cache = false;
    bool empty_space = false;
};

// GET {base}/forms?level=&weight=&p=&c=&k=&count= returning the documented
// JSON schema; arithmetic coefficients c_n are converted to a_n = c_n/sqrt(n).
// Responses are cached content-addressed under cache_dir; --offline forces
// cache-only operation.
FetchResult fetch_remote(const FetchSpec& spec);

}  // namespace wlab
