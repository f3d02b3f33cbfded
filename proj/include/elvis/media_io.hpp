#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "elvis/frame.hpp"

namespace elvis {

enum class SequenceKind { png_directory, y4m_file };

// Colour layout used when writing y4m. rgb444 stores R,G,B planes verbatim and
// tags the header with XCOLORSPACE=RGB so that our own reader round-trips
// bit-exactly; the ycbcr variants are what external encoders expect.
enum class Y4mColor { rgb444, ycbcr444, ycbcr420 };

// Picks png_directory for directories, y4m_file for *.y4m.
SequenceKind infer_kind(const std::filesystem::path& path);

FrameSequence load_sequence(const std::filesystem::path& path, SequenceKind kind,
                            FrameRate default_rate = {});
FrameSequence load_sequence(const std::filesystem::path& path);

// Returns the number of bytes written (sum of PNG files, or the y4m size).
std::uintmax_t write_sequence(const FrameSequence& seq, const std::filesystem::path& path,
                              SequenceKind kind, Y4mColor color = Y4mColor::rgb444);

Frame read_png(const std::filesystem::path& file);
void write_png(const Frame& frame, const std::filesystem::path& file);
// Single-channel PNG, used for in-painting masks.
void write_gray_png(int width, int height, std::span<const std::uint8_t> gray,
                    const std::filesystem::path& file);

// Zero-padded name used for frame files, counting from 1: 00001.png.
std::filesystem::path frame_file_name(int index);

// Bilinear resample to width x height; returns the input unchanged when the
// size already matches. nearest=true is used for binary masks.
FrameSequence scale_sequence(const FrameSequence& seq, int width, int height, bool nearest = false);

// Pads right/bottom by edge replication up to the next multiple of block_size.
// block_size must be one of 8, 16, 32, 64.
FrameSequence align_to_blocks(const FrameSequence& seq, int block_size);

// Removes alignment padding, restoring original_width x original_height.
FrameSequence crop_to_original(const FrameSequence& seq);

// Cuts between frames n and n+1 when the mean absolute luma difference exceeds
// threshold.
std::vector<FrameSequence> split_scenes(const FrameSequence& seq, double threshold);

double mean_abs_luma_difference(const Frame& a, const Frame& b);

}  // namespace elvis
