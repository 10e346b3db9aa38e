/* Minimal consumer of the stardisc C API. Prints one line per call. */
#include <stdio.h>
#include "stardisc.h"

static int fail(const char *what) {
    const char *msg = stardisc_last_error();
    fprintf(stderr, "%s failed: %s\n", what, msg ? msg : "(no message)");
    return 1;
}

int main(void) {
    StardiscPointSet *points = NULL;
    if (stardisc_generate(STARDISC_GENERATOR_GRID, 1600, 2, 0, &points) != STARDISC_STATUS_OK)
        return fail("generate");

    double value = 0.0;
    double corner[2];
    StardiscSide side;
    if (stardisc_star_discrepancy_exact(points, 0, 1, &value, corner, &side) != STARDISC_STATUS_OK)
        return fail("exact");
    printf("exact %.17g\n", value);

    uint64_t guaranteed = 0;
    if (stardisc_guaranteed_chain_length(2, 0.05, 20.0, &guaranteed) != STARDISC_STATUS_OK)
        return fail("guaranteed");

    StardiscChainResult *result = NULL;
    if (stardisc_certify(points, 0.05, 20.0, &result) != STARDISC_STATUS_OK)
        return fail("certify");
    printf("certificate %d k %zu guaranteed %llu\n",
           (int)stardisc_chain_result_is_certificate(result),
           stardisc_chain_result_steps(result),
           (unsigned long long)guaranteed);

    char *json = NULL;
    if (stardisc_chain_result_to_json(result, &json) != STARDISC_STATUS_OK)
        return fail("to_json");
    bool valid = false;
    if (stardisc_verify_certificate_json(points, json, &valid) != STARDISC_STATUS_OK)
        return fail("verify");
    printf("valid %d\n", (int)valid);

    double bad[2] = {0.5, 1.5};
    StardiscPointSet *rejected = NULL;
    StardiscStatus status = stardisc_point_set_new(bad, 1, 2, &rejected);
    printf("out-of-range status %d\n", (int)status);

    stardisc_string_free(json);
    stardisc_chain_result_free(result);
    stardisc_point_set_free(points);
    return 0;
}
