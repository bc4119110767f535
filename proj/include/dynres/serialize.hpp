#pragma once

// JSON artifacts and CSV emitters. Every JSON document carries
// "schema": "dynres/1" and a "kind" tag; loaders validate both and name
// the offending field on malformed input, so artifacts round-trip without
// loss and failures are diagnosable. CSV output uses fixed precision to
// keep identical inputs byte-identical.

#include "dynres/channel.hpp"
#include "dynres/scenarios.hpp"
#include "dynres/superchannels.hpp"
#include "dynres/tasks.hpp"

#include <string>
#include <vector>

namespace dynres {

inline constexpr const char* kSchemaTag = "dynres/1";

// Serializers return the document text; loaders parse and validate it.
// save_* / load_* pairs exist for everything the command line ingests or
// emits as a single artifact.
std::string channel_to_json(const Channel& ch);
Channel channel_from_json(const std::string& text);

std::string box_to_json(const Box& b);
Box box_from_json(const std::string& text);

std::string povm_set_to_json(const PovmSet& s);
PovmSet povm_set_from_json(const std::string& text);

std::string superchannel_to_json(const Superchannel& theta);
Superchannel superchannel_from_json(const std::string& text);

// Single-result documents. The monotone document records the measure name,
// value, solver status, and bound direction; the transformation document
// records the certificate (or the obstruction when construction failed).
std::string monotone_to_json(const std::string& measure, const MonotoneResult& r);
std::string transformation_to_json(const Transformation& t);
std::string obstruction_to_json(const std::string& reason);

std::string rate_to_json(const std::string& task, const RateResult& r);

// CSV emitters. Headers are fixed; rows print at 9 decimal places.
std::string isotropic_scan_to_csv(const std::vector<IsotropicRow>& rows);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

// Small file helpers shared by the command line and tests.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace dynres
