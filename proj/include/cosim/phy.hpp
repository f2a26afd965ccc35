#pragma once

#include <cstdint>

namespace cosim {

// 802.11a (OFDM, 20 MHz) timing and DCF parameters.
inline constexpr int64_t kSlotUs = 9;
inline constexpr int64_t kSifsUs = 16;
inline constexpr int64_t kDifsUs = kSifsUs + 2 * kSlotUs;
inline constexpr int64_t kPreambleUs = 20;
inline constexpr int64_t kSymbolUs = 4;
inline constexpr int kCwMin = 15;
inline constexpr int kCwMax = 1023;
inline constexpr int kRetryLimit = 7;

// Control frames go out at a mandatory basic rate.
inline constexpr int kAckRateMbps = 24;
inline constexpr int kAckBytes = 14;

// Bytes added around a UDP payload before it hits the air.
inline constexpr int kUdpIpOverheadBytes = 28;  // 8 UDP + 20 IPv4
inline constexpr int kMacOverheadBytes = 36;    // MAC header + LLC/SNAP + FCS

bool is_supported_rate(int rate_mbps);

// Data bits carried per 4 us OFDM symbol. Throws ValidationError for a rate
// outside the 802.11a set {6, 9, 12, 18, 24, 36, 48, 54}.
int bits_per_symbol(int rate_mbps);

// On-air duration of a PPDU whose PSDU is frame_bytes long: preamble plus
// however many whole symbols the service bits, payload and tail bits need.
int64_t frame_airtime_us(int frame_bytes, int rate_mbps);

// Airtime of a data frame carrying a UDP payload, including the UDP/IP and
// MAC-level overhead bytes.
int64_t data_airtime_us(int payload_bytes, int rate_mbps);

int64_t ack_airtime_us();

// Minimum SNR (dB) at which a frame sent at this rate decodes.
double min_snr_db(int rate_mbps);

bool can_decode(double rx_power_dbm, double noise_floor_dbm, int rate_mbps);

}  // namespace cosim
