function f(n) {
  var s = "hello";
  var k;
  if (n > 1) {
    k = 2;
  } else {
    k = 4;
  }
  return s.substr(k, 2);
}
