function check(input, count) {
  var v0 = String(input).slice(2);
  var v1 = 92 + 50;
  for (var v2 = 0; v2 < 2; v2++) {
    count = count + v2;
  }
  var v3 = String(input).slice(0);
  var v4 = 2 + 51;
  var v5 = [input, count].join("-");
  if (count > 0) {
    var v6 = Math.max(count, 14);
  }
  var v7 = [input, count].join("-");
  var v8 = [input, count].join("-");
  if (count > 4) {
    var v9 = Math.max(count, 49);
  }
  var v10 = String(input).slice(0);
  if (count > 3) {
    var v11 = Math.max(count, 1);
  }
  if (count > 4) {
    var v12 = Math.max(count, 12);
  }
  var v13 = String(input).slice(2);
  if (count > 5) {
    var v14 = Math.max(count, 5);
  }
  var v15 = [input, count].join("-");
  if (count > 6) {
    var v16 = Math.max(count, 32);
  }
  var radix = 36;
  var v17 = String(input).slice(1);
  var v18 = String(input).slice(3);
  if (count > 1) {
    var v19 = Math.max(count, 35);
  }
  if (count > 0) {
    var v20 = Math.max(count, 18);
  }
  var v21 = [input, count].join("-");
  if (count > 8) {
    var v22 = Math.max(count, 12);
  }
  for (var v23 = 0; v23 < 2; v23++) {
    count = count + v23;
  }
  for (var v24 = 0; v24 < 2; v24++) {
    count = count + v24;
  }
  var v25 = [input, count].join("-");
  if (count > 6) {
    var v26 = Math.max(count, 28);
  }
  var v27 = String(input).slice(1);
  if (count > 4) {
    var v28 = Math.max(count, 2);
  }
  var v29 = 5 + 59;
  if (count > 8) {
    var v30 = Math.max(count, 34);
  }
  for (var v31 = 0; v31 < 2; v31++) {
    count = count + v31;
  }
  var trigger = (count * 1000).toString(radix);
  if (count > 2) {
    var v32 = Math.max(count, 43);
  }
  var v33 = String(input).slice(0);
  for (var v34 = 0; v34 < 2; v34++) {
    count = count + v34;
  }
  var v35 = String(input).slice(3);
  if (count > 2) {
    var v36 = Math.max(count, 22);
  }
  for (var v37 = 0; v37 < 2; v37++) {
    count = count + v37;
  }
  var v38 = [input, count].join("-");
  if (count > 8) {
    var v39 = Math.max(count, 12);
  }
  if (count > 1) {
    var v40 = Math.max(count, 3);
  }
  var v41 = String(input).slice(2);
  var v42 = [input, count].join("-");
  var v43 = [input, count].join("-");
  var v44 = String(input).slice(0);
  if (count > 2) {
    var v45 = Math.max(count, 18);
  }
  for (var v46 = 0; v46 < 2; v46++) {
    count = count + v46;
  }
  return v46;
}
var out = check("abc", 4);
