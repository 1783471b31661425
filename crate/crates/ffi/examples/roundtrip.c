#include <stdio.h>
#include <string.h>
#include "mv2.h"

int main(void) {
    uint8_t input[256];
    for (int i = 0; i < 256; i++) input[i] = (uint8_t)i;

    Mv2Params params = { .radix = 2, .width = 8, .clone_id = 1, .rounds = 1, .input_format = 0 };
    Mv2Buffer packed = { 0 }, plain = { 0 };
    if (mv2_encode(input, sizeof input, &params, &packed) != MV2_STATUS_OK) {
        fprintf(stderr, "encode: %s\n", mv2_last_error());
        return 1;
    }
    if (mv2_decode(packed.data, packed.len, &plain) != MV2_STATUS_OK) {
        fprintf(stderr, "decode: %s\n", mv2_last_error());
        return 1;
    }
    int same = plain.len == sizeof input && memcmp(plain.data, input, plain.len) == 0;
    printf("mv2 %s: %zu -> %zu bytes, round trip %s\n", mv2_version(), sizeof input, packed.len,
           same ? "ok" : "FAILED");

    packed.data[packed.len / 2] ^= 0x10;
    Mv2Status st = mv2_decode(packed.data, packed.len, &plain);
    printf("corrupted: status %d (%s)\n", st, mv2_last_error());

    uint64_t num, den;
    mv2_ratio(2, 2, 8, &num, &den);
    printf("clone 2 ratio at (2,8): %llu/%llu\n", (unsigned long long)num, (unsigned long long)den);

    mv2_buffer_free(&packed);
    mv2_buffer_free(&plain);
    return same ? 0 : 1;
}
