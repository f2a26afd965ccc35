#include "cosim/phy.hpp"

#include <string>

#include "cosim/errors.hpp"

namespace cosim {

bool is_supported_rate(int rate_mbps) {
    switch (rate_mbps) {
        case 6:
        case 9:
        case 12:
        case 18:
        case 24:
        case 36:
        case 48:
        case 54:
            return true;
        default:
            return false;
    }
}

int bits_per_symbol(int rate_mbps) {
    if (!is_supported_rate(rate_mbps))
        throw ValidationError("unsupported rate: " + std::to_string(rate_mbps) + " Mbps");
    // Each symbol lasts 4 us, so an R Mbps rate carries 4R bits per symbol.
    return rate_mbps * 4;
}

int64_t frame_airtime_us(int frame_bytes, int rate_mbps) {
    if (frame_bytes < 0)
        throw ValidationError("negative frame size");
    int bps = bits_per_symbol(rate_mbps);
    // 16 service bits lead the PSDU and 6 tail bits close it.
    int64_t bits = 16 + 8ll * frame_bytes + 6;
    int64_t symbols = (bits + bps - 1) / bps;
    return kPreambleUs + symbols * kSymbolUs;
}

int64_t data_airtime_us(int payload_bytes, int rate_mbps) {
    if (payload_bytes < 0)
        throw ValidationError("negative payload size");
    return frame_airtime_us(payload_bytes + kUdpIpOverheadBytes + kMacOverheadBytes,
                            rate_mbps);
}

int64_t ack_airtime_us() {
    return frame_airtime_us(kAckBytes, kAckRateMbps);
}

double min_snr_db(int rate_mbps) {
    switch (rate_mbps) {
        case 6: return 5.0;
        case 9: return 6.0;
        case 12: return 8.0;
        case 18: return 10.0;
        case 24: return 13.0;
        case 36: return 17.0;
        case 48: return 21.0;
        case 54: return 25.0;
        default:
            throw ValidationError("unsupported rate: " + std::to_string(rate_mbps) +
                                  " Mbps");
    }
}

bool can_decode(double rx_power_dbm, double noise_floor_dbm, int rate_mbps) {
    return rx_power_dbm - noise_floor_dbm >= min_snr_db(rate_mbps);
}

}  // namespace cosim
