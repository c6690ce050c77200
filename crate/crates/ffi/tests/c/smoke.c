#include <math.h>
#include <stdio.h>

#include "sparse_sieve.h"

#define CHECK(cond)                                            \
    do {                                                       \
        if (!(cond)) {                                         \
            fprintf(stderr, "check failed: %s\n", #cond);      \
            return 1;                                          \
        }                                                      \
    } while (0)

int main(void) {
    SsSequence *seq = NULL;
    SsModuli *set = NULL;
    SsFarey *farey = NULL;
    double lhs = -1.0, re = 0.0, im = 0.0;
    uint64_t k = 0, count = 0;
    uint64_t mods[] = {2};

    CHECK(ss_sequence_new("ones", 2, 0, &seq) == SS_STATUS_OK);
    CHECK(ss_moduli_from_list(mods, 1, &set) == SS_STATUS_OK);
    CHECK(ss_sieve_lhs(seq, set, &lhs) == SS_STATUS_OK);
    CHECK(fabs(lhs) < 1e-12);

    CHECK(ss_gauss_sum(1, 0, 4, &re, &im) == SS_STATUS_OK);
    CHECK(fabs(re - 2.0) < 1e-12 && fabs(im - 2.0) < 1e-12);
    CHECK(ss_gauss_sum(2, 1, 4, &re, &im) == SS_STATUS_NOT_COPRIME);
    CHECK(ss_last_error() != NULL);

    CHECK(ss_quad_root_count(1, 1, 8, &count) == SS_STATUS_OK);
    CHECK(count == 4);

    ss_moduli_free(set);
    set = NULL;
    CHECK(ss_moduli_new("list:2,4", NULL, 0.0, 0.0, &set) == SS_STATUS_OK);
    CHECK(ss_farey_new(set, &farey) == SS_STATUS_OK);
    CHECK(ss_farey_len(farey) == 3);
    CHECK(ss_k_delta(farey, 0.25, &k) == SS_STATUS_OK);
    CHECK(k == 3);

    ss_farey_free(farey);
    ss_moduli_free(set);
    ss_sequence_free(seq);
    puts("ok");
    return 0;
}
