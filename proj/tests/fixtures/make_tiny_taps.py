# Copyright 2026 The Style Filter Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# Regenerates tiny_taps.onnx, its hash manifest and the torch reference vector.
import torch, torch.nn as nn
torch.manual_seed(0)
class Tiny(nn.Module):
    def __init__(s):
        super().__init__()
        s.c1=nn.Conv2d(3,4,3,padding=1); s.c2=nn.Conv2d(4,6,3,padding=1)
    def forward(s,x):
        a=torch.relu(s.c1(x)); b=torch.relu(s.c2(torch.max_pool2d(a,2)))
        return a,b
m=Tiny().eval()
torch.onnx.export(m, torch.zeros(1,3,32,32), "tiny_taps.onnx", input_names=["input"], output_names=["tap0","tap1"], opset_version=11, dynamo=False)
import math
x=torch.tensor([[[[math.sin(0.1*(c*1024+h*32+w)) for w in range(32)] for h in range(32)] for c in range(3)]],dtype=torch.float32)
a,b=m(x)
vals=[]
for t in (a,b):
    t=t[0].double()
    vals += t.mean(dim=(1,2)).tolist()
    vals += t.var(dim=(1,2),unbiased=False).tolist()
with open("tiny_taps.reference.txt","w") as f:
    f.write("# style vector of the sin-pattern input through tiny_taps.onnx (torch reference)\n")
    for v in vals: f.write("%.9g\n"%v)
import hashlib, json
digest = hashlib.sha256(open("tiny_taps.onnx","rb").read()).hexdigest()
with open("tiny_taps.hash.json","w") as f:
    json.dump({"sha256": digest, "taps": [{"name":"tap0","channels":4},{"name":"tap1","channels":6}]}, f, indent=2)
    f.write("\n")
