#include <stdio.h>
#include <string.h>

#include "tspaces.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,          \
              ts_last_error());                                       \
      return 1;                                                       \
    }                                                                 \
  } while (0)

int main(void) {
  TsField *f = NULL;
  TsSpace *w1 = NULL;
  TsPoly *g = NULL;
  TsPoly *red = NULL;
  TsVerdict v = TS_VERDICT_UNKNOWN;
  char *cert = NULL;
  char *text = NULL;
  bool valid = false;

  CHECK(ts_field_new(2, &f) == TS_STATUS_OK);
  CHECK(ts_field_order(f) == 2);
  CHECK(ts_space_parse(f, "W:1", &w1) == TS_STATUS_OK);
  CHECK(ts_poly_parse(f, "x^4 + x^5", false, &g) == TS_STATUS_OK);
  CHECK(ts_member(w1, g, 64, &v, &cert) == TS_STATUS_OK);
  CHECK(v == TS_VERDICT_MEMBER);
  CHECK(ts_check_certificate(cert, &valid, NULL) == TS_STATUS_OK);
  CHECK(valid);
  CHECK(ts_reduce(g, "W1", &red) == TS_STATUS_OK);
  CHECK(ts_poly_to_text(red, &text) == TS_STATUS_OK);
  CHECK(strcmp(text, "0") == 0);
  CHECK(ts_field_new(6, NULL) == TS_STATUS_BAD_FIELD);
  CHECK(strlen(ts_last_error()) > 0);

  ts_string_free(text);
  ts_string_free(cert);
  ts_poly_free(red);
  ts_poly_free(g);
  ts_space_free(w1);
  ts_field_free(f);
  printf("ok %s\n", ts_version());
  return 0;
}
