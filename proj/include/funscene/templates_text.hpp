#pragma once

#include <string>
#include <vector>

namespace funscene::templates {

// Bodies use {{name}} placeholders. The first three reproduce the published
// prompt figures byte for byte once placeholders are shown as <name>
// (checked by the golden-file test).
inline const std::string kTaskParseBody = R"TPL(You have to provide a textual description of the layout of a room (called the layout_prompt), given a functional prompt, that described an action to be carried out in the room. This action involves using small interactive elements of an object to accomplish a task, for example opening a drawer, turning on a tv, or turning on the room light. The answer should be concise, and only describe the characteristics and relationships of the object. Additional objects can be added, as long as they are consistent with the room type.  It's very important to describe the layout of the object mentioned in the prompt, but other objects are optional. Additionally, you have to provide the name of the object that contains the small interactive element that allows to carry out the action. Additionally, you have to provide the object type, which can be "door", "window", or "other". Additionally, you have to provide a context-free version of the functional prompt. This should exclude any information that describe the position of the object in the scene ("next to the TV", "in the living room"). Format the output in the following YAML format:

```yaml
layout_prompt: the textual description of the room layout
context_free_prompt: the context-free version of the functional prompt
object_name: the name of the object
object_type: can be "door","window" or "other"
```

A few examples. If the functional prompt is "Open the fourth drawer of the cabinet next to the TV", a correct output would be the following:
```yaml
layout_prompt: A living room with a TV and a cabinet. The cabinet is next to the TV and has multiple drawers.
context_free_prompt: Open the fourth drawer of the cabinet
object_name: cabinet
object_type: other
```

For "Open the bedroom door", a correct output would be the following:
```yaml
layout_prompt: A bedroom with a bed, a door, a nightstand
context_free_prompt: Open the bedroom door
object_name: door
object_type: door
```

For "Open the window next to the wardrobe", a correct output would be the following:
```yaml
layout_prompt: A room with a window, a wardrobe, and a bed
context_free_prompt: Open the window
object_name: window
object_type: window
```
                         
For "Turn on the bedroom light", a correct output would be the following:
```yaml
layout_prompt: A room with a bed, a ceiling light, and a light switch
context_free_prompt: Turn on the light
object_name: light switch
object_type: other
```

Here is the functional prompt: {{prompt}})TPL";

inline const std::string kRequirementBody = R"TPL(You are an expert robotic manipulation system. You have access to a set of 3D object assets. Each object possess a set of functional elements, expressed in a way such as "handle: 5", meaning that this object has 5 instances of a part named "handle". A functional element is the part of an object that can be physically interacted with (e.g., grabbed, pushed, pulled). You will be given a prompt that describes an action to be carried out on an object, and you must determine the requirement, expressed as quantity of a certain object part, that is consistent with the request. You should answer in the following structured output format:

object: this is the name of the object on which the operation is to be performed
object_part: this is the name of the interactive part of the object that is relevant to the operation
object_requirement_description: this should answer the question "How many <object_part> should this <object> have to satisfy the described prompt?"
object_requirement: this is the requirement expressed in the form "element <symbol> <N>", where <symbol> is a mathematical symbol such as >, <, >=, <=, and where N is an integer

The prompt may not explicitly mention the functional element, but you should infer it from the action to be performed. Additionally, the prompt may contain a requirement on the position of the object part, such as "the leftmost drawer", or "the right handle". When this happens, you should assume that more objects part are present (e.g., "the top handle" implies at least 2 handles, one on the top and one on the bottom). Conversely, when the prompt does not contain any positional requirement, you should assume that a single functional element is present, to avoid ambiguity. Here are a few examples:

For "open the third drawer of the cabinet from the bottom", a correct output would be the following:

object: cabinet
object_part: handle
object_requirement_description: The cabinet should have at least 3 handles to satisfy the request of opening the third drawer.
object_requirement: handle >= 3

For "Regulate the temperature on the oven", a correct output would be the following:

object: oven
object_part: knob
object_requirement_description: The oven should have exactly one knob to satisfy the request of regulating the temperature.
object_requirement: knob = 1

For "Open the top left drawer of the nightstand", a correct output would be the following:

object: nightstand
object_part: handle
object_requirement_description: The existence of at least 4 handles is required to satisfy the request of opening the top left drawer.
object_requirement: handle >= 4

Only answer with the requirement, do not add any additional text. In this case, the possible functional part names are only the following: {{funclist}}.
Only values from this list may appear in `object_part` and in `object_requirement` fields.
The current prompt is: {{prompt}})TPL";

inline const std::string kArrangementBody = R"TPL(You are an expert robotic manipulation system. You have access to a small set of {{object}}. Each {{object}} possesses a set of objects of type {{func}}. You will be given a list of {{object}} objects, expressed as an object_id and a list of 2D centroids. Each centroid is the center of one of its {{func}}. You will be given an action to be carried out on an {{object}}, that references one of the {{func}}. You must choose the instance of {{object}} with the best disposition of {{func}} to satisfy the request. A few rules:
- when you are asked to "open the leftmost/rightmost/left/right X of the Y", this implies that the X (and the corresponding functional objects) are arranged horizontally, and that there are more than one.
- when you are asked to "open the top/bottom X of the Y", this implies that the X (and the corresponding functional objects) are arranged vertically, and that there are more than one.
- when you are asked to "open the Nth X of the Y from the left (or right)", this implies that the X (and the corresponding functional objects) are arranged horizontally, and that there are at least N.
- when you are asked to "open the Nth X of the Y" (without any frame of reference) this implies that the X (and the corresponding functional objects) are arranged vertically, and that there are at least N.
- when you are asked to "open the top left X of the Y, this implies that there are at least 4 X, arranged in a 2x2 grid.

The format of the input for each object is the following:


```yaml
- id: id1
  parts:
    - id: partid1
      name: partname1
      centroid: [x1, y1]
    - id: partid2
      name: partname2
      centroid: [x2, y2]
```

The field `id` specifies the unique ID of the part, while `[x, y]` are the normalized 2D coordinates of the centroid of the part, in the range [0,1]. The field `name` specifies the name of the part, which can be useful to disambiguate between different parts. You should use the name in case of ambiguity, considering that the same object may have multiple parts with the same name (e.g., a cabinet may have handles on both doors and drawers).
For example, if you are looking for "door handle", you should choose the part with name "door handle" or "handle", and not a part with name "drawer handle". If you have generic "handle", you can assume that they are the parts you can use. Consider the following facts about the coordinate system:
- The X coordinate represents the horizontal axis. A value close to 0 indicates a position on the right of the origin, while a value close to 1 indicates a position on the left of the origin.
- The Y coordinate represents the vertical axis. A value close to 0 indicates a position at the bottom of the origin, while a value close to 1 indicates a position at the top of the origin.
The output, should be a list, with an element for each object. Each object is structured as follows:

```yaml
- id: object_id1
reasoning: "briefly reason about this object in the list, explaining why it does or does not satisfy the request"
suitable: true/false (true if this object is a valid candidate, false otherwise)
part_id: id of the part that best satisfies the request, or None if no part satisfies the request
```
Reasoning strings should always be enclosed in double quotes. Strictly follow the output format, in particulat the spaces, and do not add any additional text. The current prompt is: {{prompt}})TPL";

}  // namespace funscene::templates
