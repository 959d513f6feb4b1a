#include "povm_domain.h"
#include <stdio.h>
#include <string.h>

int main(void) {
    PdPovm *povm = NULL;
    if (pd_povm_tetrahedral(&povm) != PD_STATUS_OK) return 1;
    PdState *state = NULL;
    if (pd_state_maximally_mixed(2, &state) != PD_STATUS_OK) return 2;

    double probs[4];
    if (pd_probabilities(state, povm, probs, 4) != PD_STATUS_OK) return 3;
    for (int i = 0; i < 4; i++) {
        if (probs[i] != 0.25) return 4;
    }

    uint64_t counts[4];
    if (pd_simulate_counts(state, povm, 10000, 7, counts, 4) != PD_STATUS_OK) return 5;
    uint64_t total = 0;
    for (int i = 0; i < 4; i++) total += counts[i];
    if (total != 10000) return 6;

    PdVerdict verdict;
    PdState *estimate = NULL;
    if (pd_classify(counts, 4, povm, 1.0, 10000, 0, 1e-10, &verdict, &estimate, NULL)
        != PD_STATUS_OK) return 7;
    if (verdict != PD_VERDICT_FEASIBLE || estimate == NULL) return 8;

    char *json = NULL;
    if (pd_state_to_json(estimate, &json) != PD_STATUS_OK) return 9;
    if (strstr(json, "matrix") == NULL) return 10;
    pd_string_free(json);

    uint64_t skew[4] = {70, 10, 10, 10};
    PdState *none = NULL;
    if (pd_classify(skew, 4, povm, 1.0, 10000, 0, 1e-10, &verdict, &none, NULL)
        != PD_STATUS_OK) return 11;
    if (verdict != PD_VERDICT_INSUFFICIENT || none != NULL) return 12;

    if (pd_probabilities(state, povm, probs, 2) != PD_STATUS_BUFFER_TOO_SMALL) return 13;
    if (strlen(pd_last_error_message()) == 0) return 14;

    pd_state_free(estimate);
    pd_state_free(state);
    pd_povm_free(povm);
    printf("C smoke test passed: %s\n", pd_version());
    return 0;
}
