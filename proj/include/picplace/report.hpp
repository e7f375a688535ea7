#pragma once

#include "picplace/netlist.hpp"
#include "picplace/placer.hpp"

#include <filesystem>
#include <span>
#include <string>

namespace picplace {

/// One JSON object per snapshot: the trace record of that iteration plus
/// movable and filler coordinates.
std::string trace_jsonl(const Design& design, const PlaceResult& result);

/// SVG of one snapshot: die, components, nets as pin-to-pin segments,
/// fillers dimmed.
std::string frame_svg(const Design& design, const FillerSet& fillers, const Snapshot& snap);

/// Writes frame_%06d.svg for every snapshot into `dir` (created if needed).
/// Returns the number of files written. Throws std::runtime_error if the
/// directory cannot be written.
std::size_t emit_frames(const Design& design, const PlaceResult& result,
                        const std::filesystem::path& dir);

}  // namespace picplace
